#include "btnslab/errors.hpp"
#include "btnslab/models.hpp"
#include "btnslab/variational.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace btns;

namespace {

/// Worst relative error between analytic and central-difference gradients
/// over a sample of entries, real and imaginary directions.
double gradient_error(const BTNSRep& rep, const std::function<double(const BTNSRep&)>& f,
                      const std::vector<Tensor>& grad, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double scale = 0.0;
  for (const auto& g : grad) scale = std::max(scale, g.max_abs());
  double worst = 0.0;
  for (int t = 0; t < 12; ++t) {
    const std::size_t v = rng() % rep.maps.size();
    const std::size_t x = rng() % rep.maps[v].size();
    const bool re = t % 2 == 0;
    const double fd = oracle::central_difference(f, rep, v, x, re ? cplx{1.0, 0.0} : cplx{0.0, 1.0}, 1e-5);
    const double an = re ? grad[v][x].real() : grad[v][x].imag();
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(fd), 1e-3 * scale));
  }
  return worst;
}

}  // namespace

TEST_CASE("energy matches the exact oracle") {
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const BTNSRep rep = random_init(ring(4, 2, 2), 1, 1, s);
    const Hamiltonian H = heisenberg_ring(4);
    CHECK(std::abs(energy(rep, H) - oracle::expectation(H, oracle::brute_btns(rep))) < 1e-10);
  }
}

TEST_CASE("energy gradients match finite differences on random instances") {
  std::uint64_t seed = 10;
  for (std::size_t L : {3, 4, 5}) {
    for (int a = 0; a <= 1; ++a) {
      for (std::size_t D : {1, 2}) {
        const BTNSRep rep = random_init(ring(L, D, 2), a, a, seed++);
        const Hamiltonian H = heisenberg_ring(L);
        const ValueGradient vg = energy_and_gradient(rep, H);
        auto f = [&](const BTNSRep& r) { return oracle::expectation(H, oracle::brute_btns(r)); };
        CHECK(gradient_error(rep, f, vg.grad, seed) <= 1e-5);
        const ValueGradient dense = energy_and_gradient_dense(rep, H);
        for (std::size_t v = 0; v < L; ++v) CHECK(norm(dense.grad[v] - vg.grad[v]) <= 1e-8 * (1.0 + norm(vg.grad[v])));
      }
    }
  }
}

TEST_CASE("overlap gradients match finite differences") {
  const Tensor target = random_tensor({2, 2, 2, 2}, 77);
  const auto obj = overlap_objective(target);
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const BTNSRep rep = random_init(ring(4, 2, 2), 1, 1, s);
    const ValueGradient vg = obj->value_and_gradient(rep);
    auto f = [&](const BTNSRep& r) {
      const oracle::State psi = oracle::brute_btns(r);
      return 1.0 - oracle::fidelity(psi, oracle::flat(target));
    };
    CHECK(std::abs(vg.value - f(rep)) < 1e-12);
    CHECK(gradient_error(rep, f, vg.grad, s) <= 1e-5);
  }
}

TEST_CASE("exact ground state is stationary") {
  const KnownState k = psi_state(5);
  const Hamiltonian H = separation_hamiltonian(5);
  const ValueGradient vg = energy_and_gradient(*k.btns, H);
  double g = 0.0;
  for (const auto& t : vg.grad) g += norm(t) * norm(t);
  CHECK(std::sqrt(g) <= 1e-8);
  CHECK(std::abs(vg.value - 0.1) < 1e-10);

  OptimizerConfig cfg;
  cfg.max_iters = 50;
  const DescentResult r = gradient_descent(*k.btns, *energy_objective(H), cfg);
  CHECK(r.trace.size() <= 2);
  CHECK(std::abs(r.objective - 0.1) < 1e-10);
}

TEST_CASE("accepted steps never increase the objective") {
  const Hamiltonian H = heisenberg_ring(5);
  for (bool ti : {false, true}) {
    OptimizerConfig cfg;
    cfg.max_iters = 25;
    cfg.translation_invariant = ti;
    const BTNSRep rep = ti ? random_init_ti(ring(5, 2, 2), 1, 1, 3) : random_init(ring(5, 2, 2), 1, 1, 3);
    const DescentResult r = gradient_descent(rep, *energy_objective(H), cfg);
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
      CHECK(r.trace[k].objective <= r.trace[k - 1].objective);
      CHECK(r.trace[k].iter == r.trace[k - 1].iter + 1);
    }
    CHECK(r.objective >= oracle::ground_energy(H) - 1e-9);
    CHECK(std::abs(r.objective - oracle::expectation(H, oracle::brute_btns(r.rep))) < 1e-9);
  }
}

TEST_CASE("optimizer configuration is validated") {
  OptimizerConfig cfg;
  cfg.armijo_factor = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = {};
  cfg.grad_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  const BTNSRep rep = random_init(ring(4, 2, 2), 1, 1, 1);
  cfg = {};
  cfg.translation_invariant = true;
  CHECK_THROWS(gradient_descent(rep, *energy_objective(heisenberg_ring(4)), cfg));
}

TEST_CASE("trotter gates reconstruct the exponential") {
  const Matrix h = heisenberg_ring(4).edge_operators()[0];
  const GateFactors g = trotter_gate(h, 0.1);
  CHECK(g.size() == 4);
  Matrix sum = Matrix::Zero(4, 4);
  for (const auto& [x, y] : g) sum += kron(x, y);
  CHECK((sum - oracle::expm(h, 0.1)).norm() <= 1e-12);

  const GateFactors id = trotter_gate(Matrix::Zero(4, 4), 0.3);
  REQUIRE(id.size() == 1);
  CHECK((kron(id[0].first, id[0].second) - Matrix::Identity(4, 4)).norm() < 1e-12);

  Matrix diag = Matrix::Zero(9, 9);
  for (int k = 0; k < 9; ++k) diag(k, k) = 0.3 * k;
  for (const auto& [x, y] : trotter_gate(diag, 0.2)) {
    CHECK((x - Matrix(x.diagonal().asDiagonal())).norm() < 1e-12);
    CHECK((y - Matrix(y.diagonal().asDiagonal())).norm() < 1e-12);
  }
  Matrix bad = Matrix::Zero(4, 4);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(trotter_gate(bad, 0.1), ArgumentError);
}

TEST_CASE("gates commute with dense evaluation") {
  const Hamiltonian H = heisenberg_ring(4);
  const BTNSRep rep = random_init(ring(4, 2, 2), 1, 1, 21);
  for (std::size_t e = 0; e < 4; ++e) {
    const Matrix h = H.edge_operators()[e];
    const BTNSRep out = apply_gate(rep, e, trotter_gate(h, 0.05));
    CHECK(out.shape.bond(e) == 8);
    const auto [u, w] = rep.shape.edge(e);
    const Tensor want = apply_local(btns_evaluate(rep), {u, w}, oracle::expm(h, 0.05));
    CHECK(norm(want - btns_evaluate(out)) <= 1e-9 * norm(want));
  }
  const BTNSRep same = apply_gate(rep, 1, trotter_gate(Matrix::Zero(4, 4), 0.1));
  CHECK(same.shape.bond(1) == 2);
  CHECK(norm(btns_evaluate(same) - btns_evaluate(rep)) < 1e-12);
}

TEST_CASE("gates on disjoint edges commute") {
  Matrix diag = Matrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) diag(k, k) = k * 0.7 - 1.0;
  const GateFactors g = trotter_gate(diag, 0.3);
  const BTNSRep rep = random_init(ring(4, 2, 2), 1, 1, 5);
  const Tensor ab = btns_evaluate(apply_gate(apply_gate(rep, 0, g), 2, g));
  const Tensor ba = btns_evaluate(apply_gate(apply_gate(rep, 2, g), 0, g));
  CHECK(norm(ab - ba) <= 1e-12 * norm(ab));
}

TEST_CASE("weighted truncation at p = 1 is plain SVD truncation") {
  BTNSRep rep = random_init(ring(3, 4, 2), 1, 1, 9);
  const BTNSRep t = weighted_truncate(rep, 0, 2, 1.0);
  CHECK(t.shape.bond(0) == 2);
  const Tensor pair = contract(rep.maps[0], rep.maps[1], {{1, 1}});
  const SvdResult s = svd(pair, {0, 1, 2}, {3, 4, 5}, 2);
  const Tensor got = contract(t.maps[0], t.maps[1], {{1, 1}});
  CHECK(norm(reconstruct(s) - got) <= 1e-10 * norm(got));
  CHECK(norm(weighted_truncate(rep, 0, 4, 0.5).maps[0] - rep.maps[0]) == 0.0);
}

TEST_CASE("weighted truncation beats random factorizations in the p-frame") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const double p = 0.2 + 0.15 * trial;
    const BTNSRep rep = random_init(ring(3, 4, 2), 1, 1, 300 + trial);
    const std::size_t q = rep.weight_dim();
    auto weighted_error = [&](const Tensor& pair) {
      const Tensor ref = contract(rep.maps[0], rep.maps[1], {{1, 1}});
      double acc = 0.0;
      for (std::size_t x = 0; x < ref.size(); ++x) {
        const std::size_t ew = x % q;
        const std::size_t eu = (x / (2 * 4 * q)) % q;
        acc += std::norm((ref[x] - pair[x]) * std::pow(p, static_cast<double>(eu + ew)));
      }
      return std::sqrt(acc);
    };
    const BTNSRep t = weighted_truncate(rep, 0, 2, p);
    const double best = weighted_error(contract(t.maps[0], t.maps[1], {{1, 1}}));
    for (int r = 0; r < 50; ++r) {
      const Tensor x = random_tensor({2, 2, 4, q}, rng());
      const Tensor y = random_tensor({2, 2, 4, q}, rng());
      CHECK(best <= weighted_error(contract(x, y, {{1, 1}})));
    }
  }
}

TEST_CASE("imaginary time with H = 0 leaves the state alone") {
  Hamiltonian H(ring(4, 1, 2));
  H.add({0, 1}, Matrix::Zero(4, 4));
  const BTNSRep rep = random_init(ring(4, 2, 2), 1, 1, 2);
  ItePlan plan;
  plan.sweeps = 5;
  plan.renormalize = false;
  const IteResult r = imaginary_time(rep, H, plan);
  CHECK(r.trace.size() == 6);
  const Tensor a = btns_evaluate(rep);
  const Tensor b = btns_evaluate(r.rep);
  CHECK(oracle::fidelity(oracle::flat(a), oracle::flat(b)) > 1 - 1e-12);
  for (const auto& row : r.trace) CHECK(row.objective == doctest::Approx(0.0));
}

TEST_CASE("imaginary time reaches the Heisenberg ground energy at L = 8") {
  const Hamiltonian H = heisenberg_ring(8);
  const double e0 = oracle::ground_energy(H);
  ItePlan plan;
  plan.sweeps = 200;
  plan.target_bond = 4;
  plan.beta_step = 0.05;
  const IteResult r = imaginary_time(random_init(ring(8, 4, 2), 0, 0, 1), H, plan);
  CHECK(std::abs(r.trace.back().objective - e0) <= 0.02 * std::abs(e0));
  for (const auto& row : r.trace) {
    CHECK(row.objective >= e0 - 1e-9);
    CHECK(row.grad_norm_or_bondmax == 4.0);
  }
}

TEST_CASE("plain per-edge truncation is still available") {
  const Hamiltonian H = heisenberg_ring(6);
  ItePlan plan;
  plan.sweeps = 40;
  plan.bond_weights = false;
  const IteResult r = imaginary_time(random_init(ring(6, 2, 2), 1, 1, 4), H, plan);
  CHECK(r.trace.back().objective < r.trace.front().objective);
  CHECK(r.trace.back().objective >= oracle::ground_energy(H) - 1e-9);
}

TEST_CASE("norm collapse is reported") {
  const Hamiltonian H = separation_hamiltonian(5);
  ItePlan plan;
  plan.beta_step = 20.0;
  plan.sweeps = 60;
  plan.renormalize = false;
  plan.bond_weights = false;
  CHECK_THROWS_AS(imaginary_time(random_init(ring(5, 2, 3), 1, 1, 1), H, plan), CollapseError);
}
