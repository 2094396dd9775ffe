#pragma once

#include "btnslab/network.hpp"
#include "btnslab/tensor.hpp"

#include <cstdint>
#include <vector>

namespace btns {

/// Weight state parameters: digits sum to a, each digit is at most dloc.
struct WeightSpec {
  int a = 0;
  int dloc = 0;
  std::size_t L = 1;

  [[nodiscard]] std::size_t local_dim() const { return static_cast<std::size_t>(dloc) + 1; }
};

/// Unnormalized weight state over L sites of dimension dloc+1.
Tensor build_weight_state(const WeightSpec& spec);

/// c_{alpha,a} = sum_j (-1)^(a-j) C(a,j) j^alpha, evaluated exactly.
/// Throws NumericError if the value does not fit in 64 bits.
std::int64_t weight_coefficient(int alpha, int a);

/// coefficient * phi(node * eps)^{(x) L}, with phi(x) = sum_i x^i |i>.
struct ProductTerm {
  cplx coefficient;
  cplx node;
};

/// Sum of symmetric product states, divided by eps^scale_degree on
/// evaluation.
struct ProductCurve {
  std::size_t L = 1;
  std::size_t local_dim = 1;
  int scale_degree = 0;
  std::vector<ProductTerm> terms;

  [[nodiscard]] std::vector<cplx> site_vector(const ProductTerm& term, cplx eps) const;
  /// eps^{-scale_degree} * sum of the product terms.
  [[nodiscard]] Tensor evaluate(cplx eps) const;
};

/// a+1 terms (-1)^(a-j) C(a,j)/a! phi(j eps)^{(x) L}; the limit of the
/// rescaled curve is the weight state.
ProductCurve border_rank_curve(const WeightSpec& spec);

/// Open-chain MPS of bond a+1 whose contraction is the weight state with
/// dloc = a. Requires L >= 2.
TNSRep weight_mps(const WeightSpec& spec);

/// Keeps digits 0..dloc on every site.
Tensor project_local_degree(const Tensor& t, int dloc);

/// Symmetric stencil of n = max(2 floor((a+1)/2) + 2k, a+1) samples of
/// Gamma_a at the n-th roots of unity; the error of the rescaled curve is
/// O(eps^n).
ProductCurve central_difference_curve(int a, int k, std::size_t L);

}  // namespace btns
