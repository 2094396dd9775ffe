#pragma once

#include "btnslab/graph.hpp"
#include "btnslab/hamiltonian.hpp"
#include "btnslab/network.hpp"
#include "btnslab/tensor.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace btns {

/// k-th roots of unity used to recover the constant coefficient of
/// p(eps) = eps^{-2a} <phi(conj eps)|O phi(eps)>.
struct InterpolationPlan {
  std::size_t k = 1;
  std::vector<cplx> nodes;
  std::size_t degree_bound = 0;
  int scale_degree = 0;
};

/// Plan with degree bound 2(L dloc - a) and k = bound + 1 nodes unless a
/// larger k is requested. A smaller k raises ArgumentError.
InterpolationPlan make_plan(std::size_t L, int dloc, int a, std::optional<std::size_t> k = std::nullopt);
InterpolationPlan make_plan(const BTNSRep& rep, std::optional<std::size_t> k = std::nullopt);

/// (1/k) sum_j z_j^{-scale_degree} c_j over the k-th roots of unity z_j.
cplx stable_interpolate(std::span<const cplx> samples, int scale_degree);

/// Lays the weight-state MPS along a Hamiltonian path of the graph. Path
/// edges gain a factor a+1; the combined bond index is beta (a+1) + w.
class MpsEmbedding {
 public:
  MpsEmbedding(const NetworkShape& shape, int a, int dloc, const PathCover& path);

  [[nodiscard]] const NetworkShape& embedded_shape() const { return embedded_; }
  [[nodiscard]] TNSRep embed(const BTNSRep& rep) const;
  [[nodiscard]] Tensor embed_map(std::size_t v, const Tensor& map) const;
  /// Gradient with respect to an embedded map, expressed for the bTNS map.
  [[nodiscard]] Tensor pull_back(std::size_t v, const Tensor& grad) const;

 private:
  struct VertexPlan {
    Tensor weight;  // (w_in, eta, w_out)
    std::vector<std::size_t> perm;
    Shape split_shape;
    Shape merged_shape;
  };
  NetworkShape shape_;
  NetworkShape embedded_;
  int a_ = 0;
  int dloc_ = 0;
  std::vector<VertexPlan> plans_;
};

TNSRep embed_mps_strategy(const BTNSRep& rep, const PathCover& path);

/// Product of single-site operators, applied to the ket.
using OperatorString = std::vector<std::pair<std::size_t, Matrix>>;

/// Maps of a ring or chain rewritten as (physical, left, right) sites; chain
/// ends get a unit bond.
std::vector<Tensor> mps_sites(const TNSRep& rep);
/// Inverse of mps_sites for one vertex.
Tensor site_to_map(const NetworkShape& shape, std::size_t v, const Tensor& site);
/// sum_s conj(bra[s]) (x) ket[s], rows (l_bra, l_ket), columns (r_bra, r_ket).
Matrix transfer_matrix(const Tensor& bra_site, const Tensor& ket_site);

/// <bra|ket> and, for every site v, the derivative with respect to
/// conj(bra site v) in (physical, left, right) form.
struct SiteHoles {
  cplx value{0.0, 0.0};
  std::vector<Tensor> holes;
};
SiteHoles mps_holes(const std::vector<Tensor>& bra, const std::vector<Tensor>& ket, bool want_holes = true);

/// <bra|H|ket> and its conj(bra) holes for one- and two-site terms. Terms on
/// neighbouring sites are merged per edge into a two-site transfer block.
SiteHoles hamiltonian_holes(const std::vector<Tensor>& bra, const std::vector<Tensor>& ket, const Hamiltonian& obs,
                            bool want_holes = true);

cplx transfer_matrix_overlap(const TNSRep& bra, const TNSRep& ket);
cplx transfer_matrix_overlap(const TNSRep& bra, const TNSRep& ket, const OperatorString& ops);
/// <bra|H|ket> for one- and two-site terms, each split into operator-Schmidt
/// products.
cplx transfer_matrix_overlap(const TNSRep& bra, const TNSRep& ket, const Hamiltonian& obs);

/// <bra|O|ket> with O the identity when obs is null: transfer matrices on
/// rings and chains, dense evaluation elsewhere.
cplx tns_overlap(const TNSRep& bra, const TNSRep& ket, const Hamiltonian* obs);

/// Unnormalized <psi|O|psi> through the weight-state MPS embedding.
cplx mps_strategy_expectation(const BTNSRep& rep, const Hamiltonian* obs);
/// Unnormalized <psi|O|psi> from (a+1)^2 plain overlaps per interpolation node.
cplx border_rank_expectation(const BTNSRep& rep, const Hamiltonian* obs, const InterpolationPlan& plan);
/// Normalized expectation from the border rank strategy.
double border_rank_energy(const BTNSRep& rep, const Hamiltonian& obs);

}  // namespace btns
