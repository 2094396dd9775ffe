#include "btnslab/variational.hpp"

#include "btnslab/contraction.hpp"
#include "btnslab/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

namespace btns {

void OptimizerConfig::validate() const {
  if (!(step_size > 0.0)) throw ArgumentError("step size must be positive");
  if (!(armijo_factor > 0.0 && armijo_factor < 1.0)) throw ArgumentError("armijo factor must lie in (0, 1)");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ArgumentError("armijo constant must lie in (0, 1)");
  if (!(grad_tol > 0.0) || !(energy_rel_tol > 0.0)) throw ArgumentError("tolerances must be positive");
}

void ItePlan::validate() const {
  if (!(beta_step > 0.0)) throw ArgumentError("beta step must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("p must lie in (0, 1]");
  if (target_bond == 0) throw ArgumentError("target bond must be at least 1");
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool fast_path(const BTNSRep& rep, const Hamiltonian* H) {
  const auto kind = rep.shape.kind();
  if (kind != GraphKind::ring && kind != GraphKind::chain) return false;
  if (!H) return true;
  if (H->shape().kind() != kind || H->shape().vertex_count() != rep.shape.vertex_count() ||
      H->shape().phys_dim() != rep.shape.phys_dim()) {
    return false;
  }
  return std::all_of(H->terms().begin(), H->terms().end(), [](const LocalTerm& t) { return t.support.size() <= 2; });
}

void check_observable(const BTNSRep& rep, const Hamiltonian& H) {
  if (H.shape().vertex_count() != rep.shape.vertex_count() || H.shape().phys_dim() != rep.shape.phys_dim()) {
    throw DimensionError("Hamiltonian does not act on this network");
  }
}

ValueGradient fast_energy(const BTNSRep& rep, const Hamiltonian& H, bool want_grad) {
  const MpsEmbedding emb(rep.shape, rep.a, rep.dloc, snake_path(rep.shape));
  const TNSRep t = emb.embed(rep);
  const auto sites = mps_sites(t);
  const SiteHoles n = mps_holes(sites, sites, want_grad);
  const double norm2 = n.value.real();
  if (!(norm2 > 0.0)) throw DegenerateStateError("state has zero norm");
  const SiteHoles h = hamiltonian_holes(sites, sites, H, want_grad);
  ValueGradient out;
  out.value = h.value.real() / norm2;
  if (!want_grad) return out;
  for (std::size_t v = 0; v < sites.size(); ++v) {
    Tensor g = h.holes[v] - out.value * n.holes[v];
    g *= 2.0 / norm2;
    out.grad.push_back(emb.pull_back(v, site_to_map(t.shape, v, g)));
  }
  return out;
}

class EnergyObjective final : public Objective {
 public:
  explicit EnergyObjective(Hamiltonian H) : H_(std::move(H)) {}
  [[nodiscard]] double value(const BTNSRep& rep) const override { return energy(rep, H_); }
  [[nodiscard]] ValueGradient value_and_gradient(const BTNSRep& rep) const override {
    return energy_and_gradient(rep, H_);
  }

 private:
  Hamiltonian H_;
};

class OverlapObjective final : public Objective {
 public:
  explicit OverlapObjective(Tensor target) : target_(std::move(target)), tt_(std::pow(norm(target_), 2)) {
    if (!(tt_ > 0.0)) throw ArgumentError("target state is zero");
  }
  [[nodiscard]] double value(const BTNSRep& rep) const override { return compute(rep, false).value; }
  [[nodiscard]] ValueGradient value_and_gradient(const BTNSRep& rep) const override { return compute(rep, true); }

 private:
  ValueGradient compute(const BTNSRep& rep, bool want_grad) const {
    const Tensor psi = btns_evaluate(rep);
    if (psi.shape() != target_.shape()) throw DimensionError("target does not match the network");
    const double n = std::pow(norm(psi), 2);
    if (!(n > 0.0)) throw DegenerateStateError("state has zero norm");
    const cplx o = inner(target_, psi);
    const double o2 = std::norm(o);
    ValueGradient out;
    out.value = 1.0 - o2 / (tt_ * n);
    if (!want_grad) return out;
    Tensor y = (o * n) * target_ - cplx{o2, 0.0} * psi;
    y *= -2.0 / (tt_ * n * n);
    out.grad = hole_overlaps(rep, y);
    return out;
  }

  Tensor target_;
  double tt_;
};

}  // namespace

std::unique_ptr<Objective> energy_objective(const Hamiltonian& H) { return std::make_unique<EnergyObjective>(H); }

std::unique_ptr<Objective> overlap_objective(const Tensor& target) {
  return std::make_unique<OverlapObjective>(target);
}

ValueGradient energy_and_gradient_dense(const BTNSRep& rep, const Hamiltonian& H) {
  check_observable(rep, H);
  const Tensor psi = btns_evaluate(rep);
  const double n = std::pow(norm(psi), 2);
  if (!(n > 0.0)) throw DegenerateStateError("state has zero norm");
  const Tensor hpsi = H.apply(psi);
  ValueGradient out;
  out.value = inner(psi, hpsi).real() / n;
  Tensor y = hpsi - cplx{out.value, 0.0} * psi;
  y *= 2.0 / n;
  out.grad = hole_overlaps(rep, y);
  return out;
}

ValueGradient energy_and_gradient(const BTNSRep& rep, const Hamiltonian& H) {
  rep.validate();
  check_observable(rep, H);
  if (fast_path(rep, &H)) return fast_energy(rep, H, true);
  return energy_and_gradient_dense(rep, H);
}

double energy(const BTNSRep& rep, const Hamiltonian& H) {
  rep.validate();
  check_observable(rep, H);
  if (fast_path(rep, &H)) return fast_energy(rep, H, false).value;
  return expectation_exact(btns_evaluate(rep), H);
}

double norm_squared(const BTNSRep& rep) {
  rep.validate();
  if (fast_path(rep, nullptr)) return mps_strategy_expectation(rep, nullptr).real();
  return std::pow(norm(btns_evaluate(rep)), 2);
}

namespace {

double squared_norm(const Tensor& t) { return std::pow(norm(t), 2); }

void normalize_map(Tensor& m) {
  const double n = norm(m);
  if (n > 0.0 && std::isfinite(n)) m *= 1.0 / n;
}

double try_value(const Objective& objective, const BTNSRep& rep) {
  try {
    const double f = objective.value(rep);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  } catch (const DegenerateStateError&) {
    return std::numeric_limits<double>::infinity();
  }
}

/// Backtracking step x - t g from x; returns the accepted value or nothing.
template <class Build>
std::optional<double> armijo(const Objective& objective, const OptimizerConfig& cfg, double f_ref, double gsq,
                             Build build, BTNSRep& accepted) {
  double t = cfg.step_size;
  for (std::size_t h = 0; h <= cfg.max_halvings; ++h) {
    BTNSRep cand = build(t);
    const double fc = try_value(objective, cand);
    if (fc <= f_ref - cfg.armijo_c * t * gsq) {
      accepted = std::move(cand);
      return fc;
    }
    t *= cfg.armijo_factor;
  }
  return std::nullopt;
}

}  // namespace

DescentResult gradient_descent(const BTNSRep& rep0, const Objective& objective, const OptimizerConfig& cfg,
                               const TraceSink& on_row) {
  cfg.validate();
  rep0.validate();
  const auto start = Clock::now();
  DescentResult res;
  auto record = [&](const TraceRow& row) {
    res.trace.push_back(row);
    if (on_row) on_row(row);
  };
  BTNSRep rep = rep0;
  const NetworkShape shape = rep.shape;
  const std::size_t L = shape.vertex_count();
  std::uint64_t reinit_count = 0;
  auto reseed = [&]() { return cfg.seed * 0x9E3779B97F4A7C15ULL + (++reinit_count); };

  Tensor shared;
  if (cfg.translation_invariant) {
    if (shape.kind() != GraphKind::ring) throw UnsupportedError("translation invariant descent needs a ring");
    shared = ti_pull_back(shape, 1, rep.maps[1]);
    const BTNSRep check = ti_expand(shape, rep.a, rep.dloc, shared);
    for (std::size_t v = 0; v < L; ++v) {
      if (norm(check.maps[v] - rep.maps[v]) > 1e-12 * std::max(1.0, norm(rep.maps[v]))) {
        throw ArgumentError("initial representation is not translation invariant");
      }
    }
  }

  ValueGradient vg;
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      vg = objective.value_and_gradient(rep);
      break;
    } catch (const DegenerateStateError&) {
      if (attempt >= 10) throw;
      if (cfg.translation_invariant) {
        shared = random_tensor(shared.shape(), reseed());
        rep = ti_expand(shape, rep.a, rep.dloc, shared);
        res.log.push_back("iteration 0: degenerate start, shared map reinitialized");
      } else {
        const std::size_t v = attempt % L;
        rep.maps[v] = random_tensor(rep.maps[v].shape(), reseed());
        res.log.push_back("iteration 0: degenerate start, vertex " + std::to_string(v) + " reinitialized");
      }
    }
  }
  double f = vg.value;
  double gsq0 = 0.0;
  if (cfg.translation_invariant) {
    Tensor g(shared.shape());
    for (std::size_t v = 0; v < L; ++v) g += ti_pull_back(shape, v, vg.grad[v]);
    gsq0 = squared_norm(g);
  } else {
    for (const auto& g : vg.grad) gsq0 += squared_norm(g);
  }
  record({0, f, std::sqrt(gsq0), elapsed_ms(start)});
  res.stop_reason = "max_iters";

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const double f_prev = f;
    double gsq_total = 0.0;
    if (cfg.translation_invariant) {
      normalize_map(shared);
      rep = ti_expand(shape, rep.a, rep.dloc, shared);
      try {
        vg = objective.value_and_gradient(rep);
      } catch (const DegenerateStateError&) {
        shared = random_tensor(shared.shape(), reseed());
        rep = ti_expand(shape, rep.a, rep.dloc, shared);
        res.log.push_back("iteration " + std::to_string(it) + ": degenerate state, shared map reinitialized");
        f = try_value(objective, rep);
        record({it, f, 0.0, elapsed_ms(start)});
        continue;
      }
      Tensor g(shared.shape());
      for (std::size_t v = 0; v < L; ++v) g += ti_pull_back(shape, v, vg.grad[v]);
      gsq_total = squared_norm(g);
      const double f_ref = std::min(vg.value, f);
      const Tensor base = shared;
      auto build = [&](double t) { return ti_expand(shape, rep.a, rep.dloc, base - cplx{t, 0.0} * g); };
      BTNSRep accepted;
      if (auto fc = armijo(objective, cfg, f_ref, gsq_total, build, accepted)) {
        rep = std::move(accepted);
        shared = ti_pull_back(shape, 1, rep.maps[1]);
        f = *fc;
      } else {
        f = f_ref;
      }
    } else {
      for (std::size_t v = 0; v < L; ++v) {
        normalize_map(rep.maps[v]);
        try {
          vg = objective.value_and_gradient(rep);
        } catch (const DegenerateStateError&) {
          rep.maps[v] = random_tensor(rep.maps[v].shape(), reseed());
          res.log.push_back("iteration " + std::to_string(it) + ": degenerate state, vertex " + std::to_string(v) +
                            " reinitialized");
          const double fr = try_value(objective, rep);
          if (std::isfinite(fr)) f = fr;
          continue;
        }
        const Tensor& g = vg.grad[v];
        const double gsq = squared_norm(g);
        gsq_total += gsq;
        const double f_ref = std::min(vg.value, f);
        auto build = [&](double t) {
          BTNSRep cand = rep;
          cand.maps[v] -= cplx{t, 0.0} * g;
          return cand;
        };
        BTNSRep accepted;
        if (auto fc = armijo(objective, cfg, f_ref, gsq, build, accepted)) {
          rep = std::move(accepted);
          f = *fc;
        } else {
          f = f_ref;
        }
      }
    }
    const double gnorm = std::sqrt(gsq_total);
    record({it, f, gnorm, elapsed_ms(start)});
    if (gnorm < cfg.grad_tol) {
      res.stop_reason = "grad_tol";
      break;
    }
    if (std::abs(f_prev - f) <= cfg.energy_rel_tol * std::max(std::abs(f), 1e-300)) {
      res.stop_reason = "energy_rel_tol";
      break;
    }
  }
  res.rep = std::move(rep);
  res.objective = f;
  return res;
}

GateFactors trotter_gate(const Matrix& h_edge, double dt) {
  if (h_edge.rows() != h_edge.cols()) throw ArgumentError("edge operator is not square");
  if (!is_hermitian(h_edge, 1e-10)) throw ArgumentError("edge operator is not Hermitian");
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(h_edge.rows()))));
  if (static_cast<Eigen::Index>(d * d) != h_edge.rows()) throw DimensionError("edge operator is not two-site");
  const Matrix herm = 0.5 * (h_edge + h_edge.adjoint());
  const Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  const Eigen::VectorXd w = (-dt * es.eigenvalues().array()).exp();
  const Matrix g = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return operator_schmidt(g, d, 1e-13);
}

namespace {

/// Applies the operators to the physical index and merges the factor index
/// into the bond at `axis` as beta * n + l.
Tensor absorb_factors(const Tensor& map, std::size_t axis, const std::vector<const Matrix*>& ops) {
  const std::size_t d = map.extent(0);
  const std::size_t n = ops.size();
  Tensor x({n, d, d});
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        x({l, i, j}) = (*ops[l])(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  const Tensor c = contract(x, map, {{2, 0}});
  std::vector<std::size_t> perm{1};
  Shape merged{d};
  for (std::size_t k = 1; k < map.rank(); ++k) {
    perm.push_back(k + 1);
    if (k == axis) {
      perm.push_back(0);
      merged.push_back(map.extent(k) * n);
    } else {
      merged.push_back(map.extent(k));
    }
  }
  return c.permute(perm).reshape(merged);
}

}  // namespace

BTNSRep apply_gate(const BTNSRep& rep, std::size_t e, const GateFactors& factors) {
  rep.validate();
  if (e >= rep.shape.edge_count()) throw ArgumentError("edge out of range");
  if (factors.empty()) throw ArgumentError("gate has no factors");
  const std::size_t d = rep.shape.phys_dim();
  std::vector<const Matrix*> xs;
  std::vector<const Matrix*> ys;
  for (const auto& [x, y] : factors) {
    if (static_cast<std::size_t>(x.rows()) != d || static_cast<std::size_t>(y.rows()) != d || x.rows() != x.cols() ||
        y.rows() != y.cols()) {
      throw DimensionError("gate factors do not match the physical dimension");
    }
    xs.push_back(&x);
    ys.push_back(&y);
  }
  const auto [u, w] = rep.shape.edge(e);
  BTNSRep out = rep;
  out.maps[u] = absorb_factors(rep.maps[u], rep.shape.bond_axis(u, e), xs);
  out.maps[w] = absorb_factors(rep.maps[w], rep.shape.bond_axis(w, e), ys);
  out.shape.set_bond(e, rep.shape.bond(e) * factors.size());
  return out;
}

namespace {

/// Rank-target factors of the pair across e in the p-weighted frame, with
/// the singular values kept separate: pair ~ left diag(s) right.
struct PairFactors {
  Tensor left;   // map order of u with the new bond at the edge axis
  std::vector<double> s;
  Tensor right;  // map order of w with the new bond at the edge axis
};

PairFactors truncate_pair(const BTNSRep& rep, std::size_t e, std::size_t target, double p) {
  const auto [u, w] = rep.shape.edge(e);
  const Tensor& bu = rep.maps[u];
  const Tensor& bw = rep.maps[w];
  const std::size_t q = rep.weight_dim();
  const std::size_t ru = bu.rank() - 1;
  Tensor m = contract(bu, bw, {{rep.shape.bond_axis(u, e), rep.shape.bond_axis(w, e)}});
  const std::size_t cols = bw.size() / rep.shape.bond(e);
  std::vector<double> pw(q);
  for (std::size_t k = 0; k < q; ++k) pw[k] = std::pow(p, static_cast<double>(k));
  for (std::size_t x = 0; x < m.size(); ++x) m[x] *= pw[(x / cols) % q] * pw[(x % cols) % q];

  std::vector<std::size_t> rows(ru);
  std::vector<std::size_t> colax(m.rank() - ru);
  for (std::size_t k = 0; k < ru; ++k) rows[k] = k;
  for (std::size_t k = 0; k < colax.size(); ++k) colax[k] = ru + k;
  const SvdResult f = svd(m, rows, colax, target);
  const std::size_t r = f.left.shape().back();
  PairFactors out;
  out.s = f.singular_values;
  out.s.resize(r, 0.0);
  Tensor left = f.left;
  Tensor right = f.right;
  for (std::size_t x = 0; x < left.size(); ++x) left[x] *= 1.0 / pw[(x / r) % q];
  for (std::size_t x = 0; x < right.size(); ++x) right[x] *= 1.0 / pw[(x % cols) % q];

  const std::size_t du = rep.shape.degree(u);
  std::vector<std::size_t> pu{0};
  std::size_t next = 1;
  for (auto edge : rep.shape.incident(u)) pu.push_back(edge == e ? du + 1 : next++);
  pu.push_back(du);
  out.left = left.permute(pu);
  const std::size_t dw = rep.shape.degree(w);
  std::vector<std::size_t> pv{1};
  next = 2;
  for (auto edge : rep.shape.incident(w)) pv.push_back(edge == e ? 0 : next++);
  pv.push_back(dw + 1);
  out.right = right.permute(pv);
  return out;
}

/// Multiplies slice k of `axis` by w[k]^power.
void scale_axis(Tensor& t, std::size_t axis, const std::vector<double>& w, double power) {
  std::size_t inner = 1;
  for (std::size_t k = axis + 1; k < t.rank(); ++k) inner *= t.extent(k);
  const std::size_t n = t.extent(axis);
  if (w.size() != n) throw DimensionError("bond weights do not match the axis");
  for (std::size_t x = 0; x < t.size(); ++x) t[x] *= std::pow(w[(x / inner) % n], power);
}

}  // namespace

BTNSRep weighted_truncate(const BTNSRep& rep, std::size_t e, std::size_t target, double p) {
  rep.validate();
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("p must lie in (0, 1]");
  if (target == 0) throw ArgumentError("target bond must be at least 1");
  if (e >= rep.shape.edge_count()) throw ArgumentError("edge out of range");
  if (target >= rep.shape.bond(e)) return rep;
  const auto [u, w] = rep.shape.edge(e);
  PairFactors f = truncate_pair(rep, e, target, p);
  BTNSRep out = rep;
  out.shape.set_bond(e, f.s.size());
  std::vector<double> root(f.s.size());
  for (std::size_t k = 0; k < root.size(); ++k) root[k] = std::sqrt(f.s[k]);
  scale_axis(f.left, out.shape.bond_axis(u, e), root, 1.0);
  scale_axis(f.right, out.shape.bond_axis(w, e), root, 1.0);
  out.maps[u] = std::move(f.left);
  out.maps[w] = std::move(f.right);
  return out;
}

namespace {

/// Maps with every bond weight absorbed into the first endpoint of its edge.
BTNSRep absorb_weights(const BTNSRep& core, const std::vector<std::vector<double>>& lam) {
  BTNSRep out = core;
  for (std::size_t e = 0; e < lam.size(); ++e) {
    const std::size_t u = core.shape.edge(e).first;
    scale_axis(out.maps[u], core.shape.bond_axis(u, e), lam[e], 1.0);
  }
  return out;
}

}  // namespace

IteResult imaginary_time(const BTNSRep& rep0, const Hamiltonian& H, const ItePlan& plan, const TraceSink& on_row) {
  plan.validate();
  rep0.validate();
  check_observable(rep0, H);
  const auto start = Clock::now();
  const auto ops = H.edge_operators();
  std::vector<GateFactors> gates;
  for (const auto& op : ops) gates.push_back(trotter_gate(op, plan.beta_step));
  IteResult res;
  auto record = [&](const TraceRow& row) {
    res.trace.push_back(row);
    if (on_row) on_row(row);
  };
  BTNSRep core = rep0;
  std::vector<std::vector<double>> lam;
  for (std::size_t e = 0; e < core.shape.edge_count(); ++e) lam.emplace_back(core.shape.bond(e), 1.0);
  constexpr double kFloor = 1e-12;
  auto floored = [&](const std::vector<double>& w) {
    std::vector<double> out(w);
    for (auto& x : out) x = std::max(x, kFloor);
    return out;
  };

  res.rep = rep0;
  record({0, energy(res.rep, H), static_cast<double>(res.rep.shape.max_bond()), elapsed_ms(start)});
  for (std::size_t sweep = 1; sweep <= plan.sweeps; ++sweep) {
    for (std::size_t e = 0; e < gates.size(); ++e) {
      const auto [u, w] = core.shape.edge(e);
      if (plan.bond_weights) {
        for (auto f : core.shape.incident(u)) scale_axis(core.maps[u], core.shape.bond_axis(u, f), lam[f], 1.0);
        for (auto f : core.shape.incident(w)) {
          if (f != e) scale_axis(core.maps[w], core.shape.bond_axis(w, f), lam[f], 1.0);
        }
      }
      core = apply_gate(core, e, gates[e]);
      if (!plan.bond_weights) {
        core = weighted_truncate(core, e, plan.target_bond, plan.p);
        continue;
      }
      PairFactors f = truncate_pair(core, e, std::min(plan.target_bond, core.shape.bond(e)), plan.p);
      core.shape.set_bond(e, f.s.size());
      core.maps[u] = std::move(f.left);
      core.maps[w] = std::move(f.right);
      const double smax = f.s.empty() ? 0.0 : f.s.front();
      if (!(smax > 0.0)) throw CollapseError("pair vanished in sweep " + std::to_string(sweep));
      lam[e] = f.s;
      for (auto& x : lam[e]) x /= smax;
      for (auto g : core.shape.incident(u)) {
        if (g != e) scale_axis(core.maps[u], core.shape.bond_axis(u, g), floored(lam[g]), -1.0);
      }
      for (auto g : core.shape.incident(w)) {
        if (g != e) scale_axis(core.maps[w], core.shape.bond_axis(w, g), floored(lam[g]), -1.0);
      }
    }
    res.rep = plan.bond_weights ? absorb_weights(core, lam) : core;
    const double n = std::sqrt(std::max(norm_squared(res.rep), 0.0));
    if (!(n >= 1e-30)) throw CollapseError("state norm collapsed in sweep " + std::to_string(sweep));
    if (plan.renormalize) {
      res.rep.maps[0] *= 1.0 / n;
      core.maps[0] *= 1.0 / n;
    }
    record({sweep, energy(res.rep, H), static_cast<double>(res.rep.shape.max_bond()), elapsed_ms(start)});
  }
  return res;
}

}  // namespace btns
