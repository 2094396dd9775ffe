#include "btnslab/tensor.hpp"

#include "btnslab/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace btns {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

namespace {

void check_shape(const Shape& shape) {
  for (auto e : shape) {
    if (e == 0) throw DimensionError("tensor extents must be positive");
  }
}

std::vector<std::size_t> strides_of(const Shape& shape) {
  std::vector<std::size_t> s(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) s[i - 1] = s[i] * shape[i];
  return s;
}

}  // namespace

Tensor::Tensor() : data_(1, cplx{0.0, 0.0}) {}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_size(shape_), cplx{0.0, 0.0});
}

Tensor::Tensor(Shape shape, std::vector<cplx> data) : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_size(shape_)) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape size " + std::to_string(shape_size(shape_)));
  }
}

Tensor Tensor::scalar(cplx value) { return Tensor(Shape{}, {value}); }

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = 1.0;
  return t;
}

Tensor Tensor::from_matrix(const Matrix& m, Shape shape) {
  if (static_cast<std::size_t>(m.size()) != shape_size(shape)) {
    throw DimensionError("matrix size does not match requested tensor shape");
  }
  Tensor t(std::move(shape));
  const auto cols = static_cast<std::size_t>(m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      t.data_[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)] = m(r, c);
    }
  }
  return t;
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) throw ArgumentError("axis out of range");
  return shape_[axis];
}

std::size_t Tensor::offset(std::span<const std::size_t> idx) const {
  if (idx.size() != shape_.size()) throw DimensionError("index arity does not match tensor rank");
  std::size_t off = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= shape_[k]) throw ArgumentError("index out of range");
    off = off * shape_[k] + idx[k];
  }
  return off;
}

cplx& Tensor::operator()(std::initializer_list<std::size_t> idx) {
  return data_[offset(std::span<const std::size_t>(idx.begin(), idx.size()))];
}

const cplx& Tensor::operator()(std::initializer_list<std::size_t> idx) const {
  return data_[offset(std::span<const std::size_t>(idx.begin(), idx.size()))];
}

cplx& Tensor::at(std::span<const std::size_t> idx) { return data_[offset(idx)]; }
const cplx& Tensor::at(std::span<const std::size_t> idx) const { return data_[offset(idx)]; }

Tensor Tensor::permute(std::span<const std::size_t> perm) const {
  const std::size_t r = rank();
  if (perm.size() != r) throw DimensionError("permutation arity does not match tensor rank");
  std::vector<bool> seen(r, false);
  for (auto p : perm) {
    if (p >= r || seen[p]) throw ArgumentError("invalid permutation");
    seen[p] = true;
  }
  bool trivial = true;
  for (std::size_t k = 0; k < r; ++k) trivial = trivial && perm[k] == k;
  if (trivial) return *this;

  Shape out_shape(r);
  for (std::size_t k = 0; k < r; ++k) out_shape[k] = shape_[perm[k]];
  const auto in_strides = strides_of(shape_);
  std::vector<std::size_t> src_stride(r);
  for (std::size_t k = 0; k < r; ++k) src_stride[k] = in_strides[perm[k]];

  Tensor out(out_shape);
  // Innermost output axis is walked in a tight loop; the others by odometer.
  const std::size_t inner_n = out_shape[r - 1];
  const std::size_t inner_stride = src_stride[r - 1];
  std::vector<std::size_t> counter(r, 0);
  std::size_t src = 0;
  std::size_t dst = 0;
  const std::size_t total = out.size();
  while (dst < total) {
    for (std::size_t i = 0; i < inner_n; ++i) out.data_[dst + i] = data_[src + i * inner_stride];
    dst += inner_n;
    for (std::size_t k = r - 1; k-- > 0;) {
      if (++counter[k] < out_shape[k]) {
        src += src_stride[k];
        break;
      }
      src -= (out_shape[k] - 1) * src_stride[k];
      counter[k] = 0;
    }
  }
  return out;
}

Tensor Tensor::reshape(Shape shape) const& {
  Tensor copy = *this;
  return std::move(copy).reshape(std::move(shape));
}

Tensor Tensor::reshape(Shape shape) && {
  check_shape(shape);
  if (shape_size(shape) != data_.size()) throw DimensionError("reshape changes the number of entries");
  shape_ = std::move(shape);
  return std::move(*this);
}

Tensor Tensor::conj() const {
  Tensor out = *this;
  for (auto& x : out.data_) x = std::conj(x);
  return out;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (const auto& x : data_) m = std::max(m, std::abs(x));
  return m;
}

Matrix Tensor::matrix(std::size_t row_rank) const {
  if (row_rank > rank()) throw ArgumentError("row rank exceeds tensor rank");
  std::size_t rows = 1;
  for (std::size_t k = 0; k < row_rank; ++k) rows *= shape_[k];
  const std::size_t cols = data_.size() / rows;
  Eigen::Map<const RowMatrix> view(data_.data(), static_cast<Eigen::Index>(rows),
                                   static_cast<Eigen::Index>(cols));
  return Matrix(view);
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (other.shape_ != shape_) throw DimensionError("shape mismatch in tensor addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (other.shape_ != shape_) throw DimensionError("shape mismatch in tensor subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(cplx factor) {
  for (auto& x : data_) x *= factor;
  return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(cplx factor, Tensor a) { return a *= factor; }
Tensor operator*(Tensor a, cplx factor) { return a *= factor; }

Tensor contract(const Tensor& a, const Tensor& b, std::span<const IndexPair> pairs) {
  std::vector<bool> used_a(a.rank(), false);
  std::vector<bool> used_b(b.rank(), false);
  for (const auto& [ia, ib] : pairs) {
    if (ia >= a.rank() || ib >= b.rank()) throw ArgumentError("contraction index out of range");
    if (used_a[ia] || used_b[ib]) throw ArgumentError("repeated index in contraction pairs");
    used_a[ia] = used_b[ib] = true;
    if (a.extent(ia) != b.extent(ib)) {
      throw DimensionError("contracted extents differ: " + std::to_string(a.extent(ia)) + " vs " +
                           std::to_string(b.extent(ib)));
    }
  }

  std::vector<std::size_t> perm_a;
  std::vector<std::size_t> perm_b;
  Shape out_shape;
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t k = 1;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (!used_a[i]) {
      perm_a.push_back(i);
      out_shape.push_back(a.extent(i));
      m *= a.extent(i);
    }
  }
  for (const auto& [ia, ib] : pairs) {
    perm_a.push_back(ia);
    perm_b.push_back(ib);
    k *= a.extent(ia);
  }
  for (std::size_t i = 0; i < b.rank(); ++i) {
    if (!used_b[i]) {
      perm_b.push_back(i);
      out_shape.push_back(b.extent(i));
      n *= b.extent(i);
    }
  }

  const Tensor pa = a.permute(perm_a);
  const Tensor pb = b.permute(perm_b);
  Eigen::Map<const RowMatrix> ma(pa.data().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  Eigen::Map<const RowMatrix> mb(pb.data().data(), static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  Tensor out(out_shape);
  Eigen::Map<RowMatrix> mc(out.data().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  mc.noalias() = ma * mb;
  return out;
}

Tensor contract(const Tensor& a, const Tensor& b, std::initializer_list<IndexPair> pairs) {
  return contract(a, b, std::span<const IndexPair>(pairs.begin(), pairs.size()));
}

Tensor outer(const Tensor& a, const Tensor& b) { return contract(a, b, std::span<const IndexPair>{}); }

SvdResult svd(const Tensor& m, std::span<const std::size_t> row_axes, std::span<const std::size_t> col_axes,
              std::optional<std::size_t> max_rank, double cutoff) {
  if (row_axes.size() + col_axes.size() != m.rank()) {
    throw ArgumentError("svd bipartition must cover every index exactly once");
  }
  std::vector<bool> seen(m.rank(), false);
  std::vector<std::size_t> perm;
  Shape row_shape;
  Shape col_shape;
  for (auto ax : row_axes) {
    if (ax >= m.rank() || seen[ax]) throw ArgumentError("invalid svd bipartition");
    seen[ax] = true;
    perm.push_back(ax);
    row_shape.push_back(m.extent(ax));
  }
  for (auto ax : col_axes) {
    if (ax >= m.rank() || seen[ax]) throw ArgumentError("invalid svd bipartition");
    seen[ax] = true;
    perm.push_back(ax);
    col_shape.push_back(m.extent(ax));
  }
  if (max_rank && *max_rank == 0) throw ArgumentError("max_rank must be positive");
  if (cutoff < 0.0) throw ArgumentError("cutoff must be non-negative");

  const Matrix mat = m.permute(perm).matrix(row_axes.size());
  Eigen::JacobiSVD<Matrix> solver(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = solver.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;

  std::size_t keep = 0;
  const auto limit = max_rank.value_or(static_cast<std::size_t>(s.size()));
  while (keep < static_cast<std::size_t>(s.size()) && keep < limit && s(static_cast<Eigen::Index>(keep)) > 0.0 &&
         s(static_cast<Eigen::Index>(keep)) > cutoff * smax) {
    ++keep;
  }
  double discarded = 0.0;
  for (auto i = static_cast<Eigen::Index>(keep); i < s.size(); ++i) discarded += s(i) * s(i);

  SvdResult out;
  out.truncation_error = std::sqrt(discarded);
  const std::size_t bond = std::max<std::size_t>(keep, 1);
  Shape left_shape = row_shape;
  left_shape.push_back(bond);
  Shape right_shape{bond};
  right_shape.insert(right_shape.end(), col_shape.begin(), col_shape.end());
  if (keep == 0) {
    out.left = Tensor(left_shape);
    out.right = Tensor(right_shape);
    return out;
  }
  const auto kr = static_cast<Eigen::Index>(keep);
  out.singular_values.assign(s.data(), s.data() + keep);
  out.left = Tensor::from_matrix(solver.matrixU().leftCols(kr), left_shape);
  out.right = Tensor::from_matrix(solver.matrixV().leftCols(kr).adjoint(), right_shape);
  return out;
}

SvdResult svd(const Tensor& m, std::initializer_list<std::size_t> row_axes,
              std::initializer_list<std::size_t> col_axes, std::optional<std::size_t> max_rank,
              double cutoff) {
  return svd(m, std::span<const std::size_t>(row_axes.begin(), row_axes.size()),
             std::span<const std::size_t>(col_axes.begin(), col_axes.size()), max_rank, cutoff);
}

Tensor reconstruct(const SvdResult& r) {
  Tensor scaled = r.left;
  const std::size_t bond = r.left.shape().back();
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    const std::size_t j = i % bond;
    scaled[i] *= j < r.singular_values.size() ? r.singular_values[j] : 0.0;
  }
  return contract(scaled, r.right, {{scaled.rank() - 1, 0}});
}

cplx inner(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw DimensionError("inner product of tensors with different shapes");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double norm(const Tensor& a) {
  double acc = 0.0;
  for (const auto& x : a.data()) acc += std::norm(x);
  return std::sqrt(acc);
}

}  // namespace btns
