#include "btnslab/errors.hpp"
#include "btnslab/hamiltonian.hpp"
#include "btnslab/models.hpp"
#include "btnslab/network.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace btns;

TEST_CASE("btns_evaluate agrees with the brute-force sum") {
  std::uint64_t seed = 1;
  for (std::size_t L : {3, 4}) {
    for (int a = 0; a <= 2; ++a) {
      for (int dl = (a == 0 ? 0 : 1); dl <= a; ++dl) {
        const BTNSRep rep = random_init(ring(L, 2, 2), a, dl, seed++);
        const oracle::State want = oracle::brute_btns(rep);
        CHECK(oracle::distance(oracle::flat(btns_evaluate(rep)), want) <= 1e-10 * oracle::norm(want));
      }
    }
  }
  const BTNSRep g = random_init(grid(2, 2, 2, 2), 1, 1, 99);
  CHECK(oracle::distance(oracle::flat(btns_evaluate(g)), oracle::brute_btns(g)) < 1e-10);
}

TEST_CASE("a plain network is a bTNS with a = dloc = 0") {
  const BTNSRep r = random_init(ring(4, 2, 2), 0, 0, 5);
  TNSRep t;
  t.shape = r.shape;
  for (const auto& m : r.maps) {
    Shape s = m.shape();
    s.pop_back();
    t.maps.push_back(m.reshape(s));
  }
  CHECK(norm(tns_evaluate(t) - btns_evaluate(as_btns(t))) == 0.0);
  CHECK(norm(tns_evaluate(t) - btns_evaluate(r)) == 0.0);
}

TEST_CASE("translation invariant initial states are shift invariant") {
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const BTNSRep rep = random_init_ti(ring(5, 2, 2), 1, 1, s);
    const Tensor psi = btns_evaluate(rep);
    CHECK(norm(cyclic_shift(psi) - psi) <= 1e-12 * norm(psi));
    for (std::size_t v = 0; v < 5; ++v) CHECK(norm(ti_pull_back(rep.shape, v, rep.maps[v]) - ti_pull_back(rep.shape, 1, rep.maps[1])) == 0.0);
  }
}

TEST_CASE("degeneration limit equals the bTNS of its coefficients") {
  const KnownState w = w_state(5);
  REQUIRE(w.degeneration.has_value());
  const Tensor limit = btns_evaluate(degeneration_to_btns(*w.degeneration));
  const double eps = 1e-6;
  Tensor curve = tns_evaluate(degeneration_evaluate(*w.degeneration, eps));
  curve *= 1.0 / eps;
  CHECK(norm(curve - limit) < 1e-4);
  CHECK(w.degeneration->error_degree() >= 1);
}

TEST_CASE("degeneration expansion recovers every order") {
  const KnownState w = w_state(4);
  const auto psis = degeneration_expansion(*w.degeneration);
  CHECK(norm(psis[0]) < 1e-10);
  CHECK(oracle::distance(oracle::flat(psis[1]), oracle::weight_state(1, 1, 4)) < 1e-10);
}

TEST_CASE("exact expectation agrees with the term-by-term oracle") {
  const Hamiltonian H = heisenberg_ring(5);
  const Tensor psi = random_tensor({2, 2, 2, 2, 2}, 3);
  CHECK(std::abs(expectation_exact(psi, H) - oracle::expectation(H, oracle::flat(psi))) < 1e-12);
  CHECK_THROWS_AS(expectation_exact(Tensor({2, 2, 2, 2, 2}), H), DegenerateStateError);
}

TEST_CASE("hole overlaps are derivatives of the overlap") {
  const BTNSRep rep = random_init(ring(3, 2, 2), 1, 1, 8);
  const Tensor y = random_tensor({2, 2, 2}, 9);
  const auto holes = hole_overlaps(rep, y);
  const double h = 1e-6;
  for (std::size_t v = 0; v < 3; ++v) {
    for (std::size_t x = 0; x < rep.maps[v].size(); x += 3) {
      auto f = [&](const BTNSRep& r) { return inner(btns_evaluate(r), y).real(); };
      const double fd = oracle::central_difference(f, rep, v, x, 1.0, h);
      CHECK(std::abs(fd - holes[v][x].real()) < 1e-6);
    }
  }
}

TEST_CASE("representations are validated") {
  BTNSRep rep = random_init(ring(3, 2, 2), 1, 1, 1);
  rep.dloc = 2;
  CHECK_THROWS(rep.validate());
  CHECK_THROWS(random_init(ring(3, 2, 2), 1, 2, 1));
  CHECK_THROWS_AS(btns_evaluate(random_init(ring(12, 2, 2), 1, 1, 1), 100), ResourceError);
}
