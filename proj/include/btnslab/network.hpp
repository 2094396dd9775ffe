#pragma once

#include "btnslab/graph.hpp"
#include "btnslab/hamiltonian.hpp"
#include "btnslab/tensor.hpp"

#include <cstdint>
#include <vector>

namespace btns {

inline constexpr std::size_t kDefaultAmplitudeCap = std::size_t{1} << 20;

/// Plain tensor network: one map per vertex with index order
/// (physical, bonds by edge id).
struct TNSRep {
  NetworkShape shape;
  std::vector<Tensor> maps;

  void validate() const;
};

/// Tensor network whose maps carry an extra trailing weight index of extent
/// dloc+1, contracted against the weight state of weight a.
struct BTNSRep {
  NetworkShape shape;
  int a = 0;
  int dloc = 0;
  std::vector<Tensor> maps;

  [[nodiscard]] std::size_t weight_dim() const { return static_cast<std::size_t>(dloc) + 1; }
  void validate() const;
};

/// Local maps polynomial in eps: coeffs[v][eta] is the eps^eta coefficient
/// of the map at v, in TNSRep index order.
struct DegenerationCurve {
  NetworkShape shape;
  int a = 0;
  int dloc = 0;
  std::vector<std::vector<Tensor>> coeffs;

  void validate() const;
  /// Highest eps power of the evaluated state with a nonzero coefficient,
  /// minus a.
  [[nodiscard]] int error_degree() const;
};

Tensor tns_evaluate(const TNSRep& rep, std::size_t cap = kDefaultAmplitudeCap);
Tensor btns_evaluate(const BTNSRep& rep, std::size_t cap = kDefaultAmplitudeCap);

TNSRep degeneration_evaluate(const DegenerationCurve& curve, cplx eps);
BTNSRep degeneration_to_btns(const DegenerationCurve& curve);

/// Coefficient states psi_0, ..., psi_{dloc L} of tns_evaluate(evaluate(eps))
/// recovered from samples on the unit circle. The fit is checked at an
/// off-grid point; the sample count grows up to degree + 5 before a
/// NumericError is raised.
std::vector<Tensor> degeneration_expansion(const DegenerationCurve& curve, std::size_t cap = kDefaultAmplitudeCap);

/// <psi|O|psi> / <psi|psi>. Throws DegenerateStateError for the zero state.
double expectation_exact(const Tensor& state, const Hamiltonian& obs);
double expectation_exact(const Tensor& state, const Matrix& obs);

/// i.i.d. complex standard Gaussian entries from a seeded generator.
BTNSRep random_init(const NetworkShape& shape, int a, int dloc, std::uint64_t seed);
/// Random map shared by every vertex of a ring (index order physical, left,
/// right, weight), expanded with ti_expand.
BTNSRep random_init_ti(const NetworkShape& shape, int a, int dloc, std::uint64_t seed);
Tensor random_tensor(const Shape& shape, std::uint64_t seed);

/// Expands a shared ring map (physical, left, right, weight) to every vertex.
/// Vertex 0 sees its edges in the order (right, left).
BTNSRep ti_expand(const NetworkShape& shape, int a, int dloc, const Tensor& shared);
/// Map of vertex v rewritten in shared (physical, left, right, weight) order.
Tensor ti_pull_back(const NetworkShape& shape, std::size_t v, const Tensor& map);

/// The plain representation as a bTNS with a = dloc = 0.
BTNSRep as_btns(const TNSRep& rep);

/// Dense environment of vertex `skip`: contraction of every other vertex with
/// the bonds of `skip` left open. Result index order: the remaining physical
/// indices merged into one axis (vertex order), bonds of `skip` by edge id,
/// weight counter (a+1).
Tensor environment(const BTNSRep& rep, std::size_t skip, std::size_t cap = kDefaultAmplitudeCap);

/// Gradient block sum_x conj(Phi_v(x)) y(x) for every vertex, where Phi_v is
/// the derivative of btns_evaluate with respect to the map at v.
std::vector<Tensor> hole_overlaps(const BTNSRep& rep, const Tensor& y, std::size_t cap = kDefaultAmplitudeCap);

}  // namespace btns
