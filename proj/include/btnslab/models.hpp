#pragma once

#include "btnslab/hamiltonian.hpp"
#include "btnslab/network.hpp"
#include "btnslab/tensor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace btns {

/// Reference state with optional exact representations and recorded
/// (border) bond dimensions.
struct KnownState {
  std::string name;
  Tensor state;  ///< normalized, shape (d, ..., d)
  std::optional<int> known_bbond;
  std::optional<int> known_bond;
  std::string notes;
  std::optional<DegenerationCurve> degeneration;
  std::optional<BTNSRep> btns;
};

/// sum over ring edges of sx sx + sy sy + sz sz.
Hamiltonian heisenberg_ring(std::size_t L);
/// sum_i (I - P_{i,i+1}) + (1/2L) |2><2|_i on a ring of odd length L >= 5.
Hamiltonian separation_hamiltonian(std::size_t L);
/// The 9 x 9 projector P onto span{01, 10, 02, 21}.
Matrix separation_projector();

/// Translation invariant ground state of the separation Hamiltonian, with its
/// a = dloc = 1 degeneration (D = 2) and exact bTNS representation.
KnownState psi_state(std::size_t L);
/// 17-term state on the 3-ring with d = 9, with its a = 1 degeneration of
/// bond 3.
KnownState t_state();
/// Normalized W state on a ring with its a = 1 degeneration of bond 2.
KnownState w_state(std::size_t L);
/// Level-three GHZ state on three parties with its bond-3 representation.
KnownState ghz3();

/// Bond-4 representation of psi_L whose extra block only contributes at
/// weight 2; used to show how plain SVD truncation fails.
BTNSRep padded_psi_rep(std::size_t L);

/// Cyclic shift of the tensor factors: (S psi)(x_0, ..., x_{L-1}) =
/// psi(x_{L-1}, x_0, ..., x_{L-2}).
Tensor cyclic_shift(const Tensor& state);

struct EdResult {
  double energy = 0.0;
  Tensor state;
  std::size_t degeneracy = 0;
  /// Dimension of the shift-invariant part of the ground space.
  std::size_t ti_dimension = 0;
  bool ti_unique = false;
};

/// Lowest eigenvalue and an eigenvector; a shift-invariant one when the
/// ground space contains one. Diagonal Hamiltonians skip the eigensolver;
/// otherwise the dimension must not exceed `cap`.
EdResult ed_ground_state(const Hamiltonian& H, std::size_t cap = 4096);

struct TradeoffRow {
  double eps = 0.0;
  double norm = 0.0;
  double tau = 0.0;
  double distance = 0.0;
  double bound = 0.0;
  /// tau > 1/2: the bound is not asserted on this row.
  bool flagged = false;
};

/// Distance of the normalized curve state from its normalized limit against
/// 4 tau(eps), tau(eps) = sum_{l >= 1} eps^l ||phi_l||. Throws NumericError
/// if an unflagged row violates the bound.
std::vector<TradeoffRow> approximation_tradeoff(const DegenerationCurve& curve, const std::vector<double>& eps_grid);

/// Closed-form squared distance for the W degeneration on L sites.
double w_degeneration_distance_sq(std::size_t L, double eps);

struct ModelInfo {
  std::string name;
  std::string description;
  bool has_hamiltonian = false;
};

std::vector<ModelInfo> list_models();
/// Hamiltonian of a registered model; UnsupportedError for state-only models.
Hamiltonian model_hamiltonian(const std::string& name, std::size_t L);
KnownState model_state(const std::string& name, std::size_t L);

}  // namespace btns
