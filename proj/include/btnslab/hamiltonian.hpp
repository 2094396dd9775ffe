#pragma once

#include "btnslab/graph.hpp"
#include "btnslab/tensor.hpp"

#include <vector>

namespace btns {

/// Hermitian operator acting on the listed vertices. Rows and columns are
/// ordered like the support: the first vertex is the most significant digit.
struct LocalTerm {
  std::vector<std::size_t> support;
  Matrix matrix;
};

class Hamiltonian {
 public:
  Hamiltonian() = default;
  explicit Hamiltonian(NetworkShape shape) : shape_(std::move(shape)) {}

  /// Adds a term after checking that it is Hermitian to 1e-12 and that the
  /// support holds distinct vertices.
  void add(std::vector<std::size_t> support, Matrix matrix);

  [[nodiscard]] const NetworkShape& shape() const { return shape_; }
  [[nodiscard]] const std::vector<LocalTerm>& terms() const { return terms_; }
  [[nodiscard]] std::size_t dimension() const;

  /// H applied to a full state of shape (d, ..., d).
  [[nodiscard]] Tensor apply(const Tensor& state) const;
  /// Dense d^L x d^L matrix.
  [[nodiscard]] Matrix dense() const;
  [[nodiscard]] bool is_real() const;
  /// True when every term is diagonal in the computational basis.
  [[nodiscard]] bool is_diagonal() const;
  /// Diagonal of the dense matrix; only valid when is_diagonal().
  [[nodiscard]] Eigen::VectorXd diagonal() const;

  /// One d^2 x d^2 operator per edge, ordered like the edge endpoints. Each
  /// single-site term is folded into the lowest-id edge at its vertex.
  [[nodiscard]] std::vector<Matrix> edge_operators() const;

 private:
  NetworkShape shape_;
  std::vector<LocalTerm> terms_;
};

/// Applies a k-site operator to the given sites of a full state.
Tensor apply_local(const Tensor& state, const std::vector<std::size_t>& sites, const Matrix& op);

bool is_hermitian(const Matrix& m, double tol);
Matrix kron(const Matrix& a, const Matrix& b);

/// Operator-Schmidt factors of a two-site operator on C^d (x) C^d:
/// op = sum_l X_l (x) Y_l. Factors whose singular value is below
/// cutoff * (largest) are dropped; the zero operator gives no factors.
std::vector<std::pair<Matrix, Matrix>> operator_schmidt(const Matrix& op, std::size_t d, double cutoff = 1e-13);

}  // namespace btns
