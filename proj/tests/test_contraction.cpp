#include "btnslab/contraction.hpp"
#include "btnslab/errors.hpp"
#include "btnslab/models.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace btns;

namespace {

std::vector<cplx> roots(std::size_t k) {
  std::vector<cplx> z(k);
  for (std::size_t j = 0; j < k; ++j) z[j] = std::polar(1.0, 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(k));
  return z;
}

cplx horner(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0.0;
  for (std::size_t m = c.size(); m-- > 0;) acc = acc * z + c[m];
  return acc;
}

}  // namespace

TEST_CASE("plan size follows the degree bound") {
  const InterpolationPlan p = make_plan(5, 1, 1);
  CHECK(p.degree_bound == 8);
  CHECK(p.k == 9);
  CHECK(p.nodes.size() == 9);
  CHECK(p.scale_degree == 2);
  CHECK_THROWS_AS(make_plan(5, 1, 1, 4), ArgumentError);
  CHECK(make_plan(5, 1, 1, 12).k == 12);
}

TEST_CASE("stable interpolation agrees with a Vandermonde solve") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 1 + rng() % 12;
    std::vector<cplx> c(k);
    for (auto& x : c) x = {g(rng), g(rng)};
    const auto z = roots(k);
    std::vector<cplx> y(k);
    for (std::size_t j = 0; j < k; ++j) y[j] = horner(c, z[j]);
    const auto fit = oracle::vandermonde_fit(z, y);
    for (std::size_t s = 0; s < k; ++s) {
      CHECK(std::abs(stable_interpolate(y, static_cast<int>(s)) - fit[s]) < 1e-10);
    }
  }
}

TEST_CASE("interpolation error is bounded by the sample noise") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double delta = 1e-3;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng() % 10;
    std::vector<cplx> noise(k);
    for (auto& x : noise) {
      x = {u(rng), u(rng)};
      x *= delta * u(rng) / std::abs(x);
    }
    CHECK(std::abs(stable_interpolate(noise, static_cast<int>(rng() % k))) <= delta);
  }
}

TEST_CASE("both strategies reproduce exact expectations") {
  std::uint64_t seed = 100;
  for (std::size_t L : {3, 4, 5}) {
    for (int a = 1; a <= 2; ++a) {
      const BTNSRep rep = random_init(ring(L, 2, 2), a, a, seed++);
      const Hamiltonian H = heisenberg_ring(L);
      const oracle::State psi = oracle::brute_btns(rep);
      const double want = oracle::expectation(H, psi);
      const double nrm = std::pow(oracle::norm(psi), 2);
      CHECK(std::abs(mps_strategy_expectation(rep, nullptr).real() - nrm) <= 1e-9 * nrm);
      const double mps = (mps_strategy_expectation(rep, &H) / mps_strategy_expectation(rep, nullptr)).real();
      CHECK(std::abs(mps - want) < 1e-9);
      CHECK(std::abs(border_rank_energy(rep, H) - want) < 1e-8);
    }
  }
}

TEST_CASE("MPS strategy works on grids along the snake path") {
  const BTNSRep rep = random_init(grid(2, 2, 2, 2), 1, 1, 4);
  const oracle::State psi = oracle::brute_btns(rep);
  const cplx n = mps_strategy_expectation(rep, nullptr);
  CHECK(std::abs(n.real() - std::pow(oracle::norm(psi), 2)) < 1e-9 * std::pow(oracle::norm(psi), 2));
  const TNSRep emb = embed_mps_strategy(rep, snake_path(rep.shape));
  CHECK(oracle::distance(oracle::flat(tns_evaluate(emb)), psi) < 1e-10 * oracle::norm(psi));
}

TEST_CASE("transfer matrices give plain overlaps") {
  const BTNSRep x = random_init(ring(5, 2, 2), 0, 0, 7);
  const BTNSRep y = random_init(ring(5, 3, 2), 0, 0, 8);
  auto plain = [](const BTNSRep& r) {
    TNSRep t;
    t.shape = r.shape;
    for (const auto& m : r.maps) {
      Shape s = m.shape();
      s.pop_back();
      t.maps.push_back(m.reshape(s));
    }
    return t;
  };
  const cplx want = oracle::dot(oracle::brute_btns(x), oracle::brute_btns(y));
  CHECK(std::abs(transfer_matrix_overlap(plain(x), plain(y)) - want) < 1e-10 * std::abs(want));
  const Hamiltonian H = heisenberg_ring(5);
  const cplx hw = oracle::dot(oracle::brute_btns(x), oracle::apply_h(H, oracle::brute_btns(y)));
  CHECK(std::abs(transfer_matrix_overlap(plain(x), plain(y), H) - hw) < 1e-10 * std::abs(hw));
}

TEST_CASE("border rank strategy on the exact psi representation") {
  const KnownState k = psi_state(5);
  CHECK(std::abs(border_rank_energy(*k.btns, separation_hamiltonian(5)) - 0.1) < 1e-9);
}
