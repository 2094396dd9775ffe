#pragma once

#include "btnslab/hamiltonian.hpp"
#include "btnslab/network.hpp"
#include "btnslab/tensor.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace btns {

struct OptimizerConfig {
  std::size_t max_iters = 200;
  double step_size = 0.1;
  double armijo_factor = 0.5;
  double armijo_c = 1e-4;
  std::size_t max_halvings = 30;
  double grad_tol = 1e-8;
  double energy_rel_tol = 1e-12;
  std::uint64_t seed = 0;
  bool translation_invariant = false;

  void validate() const;
};

/// One row per iteration (or sweep): the objective after the step, the
/// gradient norm (or the largest bond for ITE) and the elapsed time.
struct TraceRow {
  std::size_t iter = 0;
  double objective = 0.0;
  double grad_norm_or_bondmax = 0.0;
  double wall_ms = 0.0;
};

/// Value and gradient g_v = 2 df/d conj(B^v) per vertex map. The real and
/// imaginary parts of g are the derivatives along real and imaginary
/// perturbations of the entries.
struct ValueGradient {
  double value = 0.0;
  std::vector<Tensor> grad;
};

class Objective {
 public:
  virtual ~Objective() = default;
  [[nodiscard]] virtual double value(const BTNSRep& rep) const = 0;
  [[nodiscard]] virtual ValueGradient value_and_gradient(const BTNSRep& rep) const = 0;
};

/// Rayleigh quotient <psi|H|psi>/<psi|psi>. Rings and chains with local terms
/// use transfer matrices on the weight-state MPS embedding; everything else
/// is contracted densely.
std::unique_ptr<Objective> energy_objective(const Hamiltonian& H);
/// 1 - |<t|psi>|^2 / (<t|t><psi|psi>).
std::unique_ptr<Objective> overlap_objective(const Tensor& target);

ValueGradient energy_and_gradient(const BTNSRep& rep, const Hamiltonian& H);
/// Dense reference for the energy gradient.
ValueGradient energy_and_gradient_dense(const BTNSRep& rep, const Hamiltonian& H);
/// Energy through the fastest exact route (transfer matrices or dense).
double energy(const BTNSRep& rep, const Hamiltonian& H);
/// <psi|psi> through the fastest exact route.
double norm_squared(const BTNSRep& rep);

struct DescentResult {
  BTNSRep rep;
  std::vector<TraceRow> trace;
  double objective = 0.0;
  std::string stop_reason;
  std::vector<std::string> log;
};

/// Alternating Armijo descent over the vertices, or over the shared map when
/// cfg.translation_invariant (rep0 must then be a TI ring representation).
/// The trace starts with the initial objective at iteration 0. `on_row`
/// sees every trace row as soon as it is recorded.
using TraceSink = std::function<void(const TraceRow&)>;
DescentResult gradient_descent(const BTNSRep& rep0, const Objective& objective, const OptimizerConfig& cfg,
                               const TraceSink& on_row = {});

using GateFactors = std::vector<std::pair<Matrix, Matrix>>;

/// Operator-Schmidt factors of exp(-dt H_edge).
GateFactors trotter_gate(const Matrix& h_edge, double dt);
/// Applies sum_l X_l (x) Y_l to the physical indices at the endpoints of
/// edge e; the bond of e grows by the number of factors.
BTNSRep apply_gate(const BTNSRep& rep, std::size_t e, const GateFactors& factors);
/// Rank-target factorization of the pair across edge e that is optimal in
/// the weighted Frobenius norm with weights p^(eta1 + eta2). A no-op when
/// the bond is already at most target.
BTNSRep weighted_truncate(const BTNSRep& rep, std::size_t e, std::size_t target, double p);

struct ItePlan {
  double beta_step = 0.05;
  std::size_t sweeps = 100;
  std::size_t target_bond = 2;
  double p = 0.9;
  bool renormalize = true;
  /// Keep singular values on the bonds and absorb the neighbouring ones
  /// before each truncation (simple update). The weights are rescaled to a
  /// largest value of one, so the norm cannot collapse in this mode.
  bool bond_weights = true;

  void validate() const;
};

struct IteResult {
  BTNSRep rep;
  std::vector<TraceRow> trace;
};

/// First-order Trotter sweeps over the edges in ascending order. Throws
/// CollapseError when the state norm drops below 1e-30. The trace holds the
/// energy and the largest bond after each sweep, starting with sweep 0.
IteResult imaginary_time(const BTNSRep& rep0, const Hamiltonian& H, const ItePlan& plan, const TraceSink& on_row = {});

}  // namespace btns
