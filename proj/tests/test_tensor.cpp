#include "btnslab/errors.hpp"
#include "btnslab/network.hpp"
#include "btnslab/tensor.hpp"

#include <doctest.h>

#include <random>

using namespace btns;

namespace {

Tensor gaussian(Shape s, std::uint64_t seed) { return random_tensor(std::move(s), seed); }

}  // namespace

TEST_CASE("contract matches explicit index loops") {
  const Tensor a = gaussian({2, 3, 4}, 1);
  const Tensor b = gaussian({4, 5, 3}, 2);
  const Tensor c = contract(a, b, {{1, 2}, {2, 0}});
  REQUIRE(c.shape() == Shape{2, 5});
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t m = 0; m < 5; ++m) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t k = 0; k < 4; ++k) acc += a({i, j, k}) * b({k, m, j});
      }
      CHECK(std::abs(c({i, m}) - acc) < 1e-12);
    }
  }
}

TEST_CASE("contraction with mismatched extents is rejected") {
  CHECK_THROWS_AS(contract(gaussian({2, 3}, 1), gaussian({4, 2}, 2), {{1, 0}}), DimensionError);
}

TEST_CASE("permute and reshape round trip") {
  const Tensor a = gaussian({2, 3, 4}, 3);
  const Tensor p = a.permute({2, 0, 1});
  CHECK(p.shape() == Shape{4, 2, 3});
  CHECK(p({3, 1, 2}) == a({1, 2, 3}));
  CHECK(norm(p.permute({1, 2, 0}) - a) == 0.0);
  CHECK(norm(a.reshape({6, 4}).reshape({2, 3, 4}) - a) == 0.0);
  CHECK_THROWS_AS((void)a.reshape({5, 5}), DimensionError);
}

TEST_CASE("outer product and inner product") {
  const Tensor a = gaussian({3}, 4);
  const Tensor b = gaussian({2}, 5);
  const Tensor o = outer(a, b);
  CHECK(o({2, 1}) == a({2}) * b({1}));
  CHECK(std::abs(inner(o, o) - inner(a, a) * inner(b, b)) < 1e-12);
  CHECK(std::abs(norm(a) * norm(a) - inner(a, a).real()) < 1e-12);
}

TEST_CASE("contraction is associative on random chains") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Tensor a = gaussian({2, 3}, 10 + s);
    const Tensor b = gaussian({3, 4}, 20 + s);
    const Tensor c = gaussian({4, 2}, 30 + s);
    const Tensor left = contract(contract(a, b, {{1, 0}}), c, {{1, 0}});
    const Tensor right = contract(a, contract(b, c, {{1, 0}}), {{1, 0}});
    CHECK(norm(left - right) < 1e-12);
  }
}

TEST_CASE("svd reconstructs and truncation error is the discarded tail") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Tensor m = gaussian({2, 3, 4}, 40 + s);
    const SvdResult full = svd(m, {0, 2}, {1});
    CHECK(norm(reconstruct(full).permute({0, 2, 1}) - m) < 1e-12);
    const SvdResult cut = svd(m, {0, 2}, {1}, 1);
    REQUIRE(cut.rank() == 1);
    double tail = 0.0;
    for (std::size_t k = 1; k < full.rank(); ++k) tail += full.singular_values[k] * full.singular_values[k];
    const double err = norm(reconstruct(cut).permute({0, 2, 1}) - m);
    CHECK(std::abs(err - std::sqrt(tail)) < 1e-10);
    CHECK(std::abs(cut.truncation_error - std::sqrt(tail)) < 1e-10);
    for (std::size_t k = 1; k < full.rank(); ++k) CHECK(full.singular_values[k - 1] >= full.singular_values[k]);
  }
}

TEST_CASE("svd of the zero matrix has rank zero") {
  const SvdResult r = svd(Tensor({3, 2}), {0}, {1});
  CHECK(r.rank() == 0);
  CHECK(norm(reconstruct(r)) == 0.0);
}

TEST_CASE("matrix view is row-major over the bipartition") {
  const Tensor a = gaussian({2, 3}, 7);
  const Matrix m = a.matrix(1);
  CHECK(m(1, 2) == a({1, 2}));
  CHECK(norm(Tensor::from_matrix(m, {2, 3}) - a) == 0.0);
}
