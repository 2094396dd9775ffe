#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace btns {

using cplx = std::complex<double>;
using Shape = std::vector<std::size_t>;
using Matrix = Eigen::MatrixXcd;
using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense complex tensor stored row-major over its index order.
///
/// A tensor with an empty shape is a scalar holding one entry. Extents are
/// always at least one, so `size()` is the product of the extents.
class Tensor {
 public:
  Tensor();
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<cplx> data);

  static Tensor scalar(cplx value);
  static Tensor identity(std::size_t n);
  /// Copies a matrix into a tensor of the given shape (row-major reading).
  static Tensor from_matrix(const Matrix& m, Shape shape);

  [[nodiscard]] std::size_t rank() const { return shape_.size(); }
  [[nodiscard]] std::size_t size() const { return data_.size(); }
  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] std::size_t extent(std::size_t axis) const;

  [[nodiscard]] std::span<const cplx> data() const { return data_; }
  [[nodiscard]] std::span<cplx> data() { return data_; }
  [[nodiscard]] const std::vector<cplx>& values() const { return data_; }

  cplx& operator[](std::size_t flat) { return data_[flat]; }
  const cplx& operator[](std::size_t flat) const { return data_[flat]; }
  cplx& operator()(std::initializer_list<std::size_t> idx);
  const cplx& operator()(std::initializer_list<std::size_t> idx) const;
  cplx& at(std::span<const std::size_t> idx);
  [[nodiscard]] const cplx& at(std::span<const std::size_t> idx) const;
  [[nodiscard]] std::size_t offset(std::span<const std::size_t> idx) const;

  /// Result index k is input index perm[k].
  [[nodiscard]] Tensor permute(std::span<const std::size_t> perm) const;
  [[nodiscard]] Tensor permute(std::initializer_list<std::size_t> perm) const {
    return permute(std::span<const std::size_t>(perm.begin(), perm.size()));
  }
  [[nodiscard]] Tensor reshape(Shape shape) const&;
  [[nodiscard]] Tensor reshape(Shape shape) &&;
  [[nodiscard]] Tensor conj() const;
  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] double max_abs() const;

  /// Views the first `row_rank` indices as rows and the rest as columns.
  [[nodiscard]] Matrix matrix(std::size_t row_rank) const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(cplx factor);

 private:
  Shape shape_;
  std::vector<cplx> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(cplx factor, Tensor a);
Tensor operator*(Tensor a, cplx factor);

std::size_t shape_size(const Shape& shape);

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Sums over the paired indices (index of a, index of b). The result carries
/// the unpaired indices of a followed by the unpaired indices of b.
Tensor contract(const Tensor& a, const Tensor& b, std::span<const IndexPair> pairs);
Tensor contract(const Tensor& a, const Tensor& b, std::initializer_list<IndexPair> pairs);
Tensor outer(const Tensor& a, const Tensor& b);

/// Truncated SVD of a tensor viewed as a matrix over a row/column bipartition.
///
/// `left` has shape (row extents..., r), `right` has shape (r, column
/// extents...). When every singular value is discarded (for instance on a
/// zero matrix) the result has rank 0: `singular_values` is empty and both
/// factors are zero tensors with a unit-extent bond so that reconstruction
/// still yields the zero matrix.
struct SvdResult {
  Tensor left;
  std::vector<double> singular_values;
  Tensor right;
  double truncation_error = 0.0;

  [[nodiscard]] std::size_t rank() const { return singular_values.size(); }
};

SvdResult svd(const Tensor& m, std::span<const std::size_t> row_axes,
              std::span<const std::size_t> col_axes,
              std::optional<std::size_t> max_rank = std::nullopt, double cutoff = 0.0);
SvdResult svd(const Tensor& m, std::initializer_list<std::size_t> row_axes,
              std::initializer_list<std::size_t> col_axes,
              std::optional<std::size_t> max_rank = std::nullopt, double cutoff = 0.0);

/// Rebuilds left * diag(s) * right as a tensor with the original row and
/// column extents (in bipartition order).
Tensor reconstruct(const SvdResult& r);

/// Sum of conj(a) * b over all entries.
cplx inner(const Tensor& a, const Tensor& b);
double norm(const Tensor& a);

}  // namespace btns
