#include "btnslab/checks.hpp"

#include "btnslab/contraction.hpp"
#include "btnslab/models.hpp"
#include "btnslab/variational.hpp"
#include "btnslab/weight_states.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

namespace btns {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    CheckResult r = body();
    r.name = name;
    return r;
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

double fidelity(const Tensor& x, const Tensor& y) {
  const double nx = norm(x);
  const double ny = norm(y);
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return std::norm(inner(x, y)) / (nx * nx * ny * ny);
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(std::uint64_t seed) {
  std::vector<CheckResult> out;

  out.push_back(guarded("weight coefficients vanish below a and equal a! at a", [] {
    for (int a = 0; a <= 8; ++a) {
      std::int64_t fact = 1;
      for (int j = 2; j <= a; ++j) fact *= j;
      for (int alpha = 0; alpha < a; ++alpha) {
        if (weight_coefficient(alpha, a) != 0) return CheckResult{"", false, "a = " + std::to_string(a)};
      }
      if (weight_coefficient(a, a) != fact) return CheckResult{"", false, "a! mismatch at a = " + std::to_string(a)};
    }
    return CheckResult{"", true, "a <= 8"};
  }));

  out.push_back(guarded("weight MPS contracts to the weight state", [] {
    for (int a = 0; a <= 3; ++a) {
      for (std::size_t L = 2; L <= 6; ++L) {
        const WeightSpec spec{a, a, L};
        if (norm(tns_evaluate(weight_mps(spec)) - build_weight_state(spec)) != 0.0) {
          return CheckResult{"", false, "a = " + std::to_string(a) + ", L = " + std::to_string(L)};
        }
      }
    }
    return CheckResult{"", true, "a <= 3, L <= 6, exact"};
  }));

  out.push_back(guarded("psi_5 representation is exact", [] {
    const KnownState k = psi_state(5);
    const double f = fidelity(btns_evaluate(*k.btns), k.state);
    return CheckResult{"", f >= 1.0 - 1e-10, "fidelity " + std::to_string(f)};
  }));

  out.push_back(guarded("contraction strategies agree", [seed] {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const BTNSRep rep = random_init(ring(4 + s % 2, 2, 2), 1 + static_cast<int>(s % 2), 1, seed + s);
      const Hamiltonian H = heisenberg_ring(rep.shape.vertex_count());
      const double exact = expectation_exact(btns_evaluate(rep), H);
      const double mps = (mps_strategy_expectation(rep, &H) / mps_strategy_expectation(rep, nullptr)).real();
      const double br = border_rank_energy(rep, H);
      worst = std::max({worst, std::abs(exact - mps), std::abs(exact - br)});
    }
    return CheckResult{"", worst <= 1e-7, "max deviation " + sci(worst)};
  }));

  out.push_back(guarded("energy gradient matches finite differences", [seed] {
    const BTNSRep rep = random_init(ring(4, 2, 2), 1, 1, seed);
    const Hamiltonian H = heisenberg_ring(4);
    const ValueGradient vg = energy_and_gradient(rep, H);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    const double h = 1e-5;
    for (int trial = 0; trial < 6; ++trial) {
      const std::size_t v = rng() % rep.maps.size();
      const std::size_t x = rng() % rep.maps[v].size();
      const cplx dir = trial % 2 == 0 ? cplx{1.0, 0.0} : cplx{0.0, 1.0};
      BTNSRep plus = rep;
      BTNSRep minus = rep;
      plus.maps[v][x] += h * dir;
      minus.maps[v][x] -= h * dir;
      const double fd = (energy(plus, H) - energy(minus, H)) / (2 * h);
      const cplx g = vg.grad[v][x];
      const double an = trial % 2 == 0 ? g.real() : g.imag();
      worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(fd), 1e-6));
    }
    return CheckResult{"", worst <= 1e-5, "max relative error " + sci(worst)};
  }));

  out.push_back(guarded("gates commute with dense evaluation", [seed] {
    const BTNSRep rep = random_init(ring(4, 2, 2), 1, 1, seed + 7);
    const Matrix h = heisenberg_ring(4).edge_operators()[1];
    const BTNSRep gated = apply_gate(rep, 1, trotter_gate(h, 0.1));
    const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Matrix g = es.eigenvectors() *
                     es.eigenvalues().unaryExpr([](double l) { return cplx(std::exp(-0.1 * l)); }).asDiagonal() *
                     es.eigenvectors().adjoint();
    const auto [u, w] = rep.shape.edge(1);
    const Tensor dense = apply_local(btns_evaluate(rep), {u, w}, g);
    const double err = norm(dense - btns_evaluate(gated)) / norm(dense);
    return CheckResult{"", err <= 1e-9, "relative error " + sci(err)};
  }));

  out.push_back(guarded("weighted truncation keeps psi_5 at p = 0.3 and loses it at p = 1", [] {
    const BTNSRep padded = padded_psi_rep(5);
    const Tensor psi = psi_state(5).state;
    const double keep = fidelity(btns_evaluate(weighted_truncate(padded, 0, 2, 0.3)), psi);
    const double lost = norm(btns_evaluate(weighted_truncate(padded, 0, 2, 1.0)));
    return CheckResult{"", keep >= 1.0 - 1e-10 && lost <= 1e-10,
                       "fidelity " + std::to_string(keep) + ", norm at p = 1 " + sci(lost)};
  }));

  out.push_back(guarded("stable interpolation recovers constant coefficients", [seed] {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t k = 2 + rng() % 10;
      const int scale = static_cast<int>(rng() % k);
      std::vector<cplx> c(k);
      for (auto& x : c) x = {g(rng), g(rng)};
      std::vector<cplx> samples(k);
      for (std::size_t j = 0; j < k; ++j) {
        const cplx z = std::polar(1.0, 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(k));
        cplx acc = 0.0;
        for (std::size_t m = k; m-- > 0;) acc = acc * z + c[m];
        samples[j] = acc;
      }
      worst = std::max(worst, std::abs(stable_interpolate(samples, scale) - c[static_cast<std::size_t>(scale)]));
    }
    return CheckResult{"", worst <= 1e-12, "max error " + sci(worst)};
  }));

  out.push_back(guarded("W degeneration distance matches the closed form", [] {
    const KnownState w = w_state(6);
    double worst = 0.0;
    const std::vector<double> grid{0.3, 0.1, 0.01};
    const auto rows = approximation_tradeoff(*w.degeneration, grid);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      worst = std::max(worst, std::abs(rows[k].distance - std::sqrt(w_degeneration_distance_sq(6, grid[k]))));
    }
    return CheckResult{"", worst <= 1e-9, "max deviation " + sci(worst)};
  }));

  return out;
}

}  // namespace btns
