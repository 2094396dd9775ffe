#include "btnslab/hamiltonian.hpp"

#include "btnslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace btns {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

void Hamiltonian::add(std::vector<std::size_t> support, Matrix matrix) {
  if (support.empty()) throw ArgumentError("term support is empty");
  std::set<std::size_t> uniq(support.begin(), support.end());
  if (uniq.size() != support.size()) throw ArgumentError("term support repeats a vertex");
  for (auto v : support) {
    if (v >= shape_.vertex_count()) throw ArgumentError("term support outside the graph");
  }
  std::size_t dim = 1;
  for (std::size_t i = 0; i < support.size(); ++i) dim *= shape_.phys_dim();
  if (static_cast<std::size_t>(matrix.rows()) != dim || static_cast<std::size_t>(matrix.cols()) != dim) {
    throw DimensionError("term matrix does not act on d^|support|");
  }
  if (!is_hermitian(matrix, 1e-12)) throw ArgumentError("Hamiltonian terms must be Hermitian");
  terms_.push_back({std::move(support), std::move(matrix)});
}

std::size_t Hamiltonian::dimension() const {
  std::size_t n = 1;
  for (std::size_t v = 0; v < shape_.vertex_count(); ++v) n *= shape_.phys_dim();
  return n;
}

Tensor apply_local(const Tensor& state, const std::vector<std::size_t>& sites, const Matrix& op) {
  const std::size_t L = state.rank();
  std::vector<std::size_t> perm(sites);
  std::vector<bool> used(L, false);
  for (auto s : sites) {
    if (s >= L) throw ArgumentError("operator site outside the state");
    used[s] = true;
  }
  for (std::size_t i = 0; i < L; ++i) {
    if (!used[i]) perm.push_back(i);
  }
  std::size_t dim = 1;
  for (auto s : sites) dim *= state.extent(s);
  if (static_cast<std::size_t>(op.rows()) != dim) throw DimensionError("operator does not match the sites");
  const Tensor moved = state.permute(perm);
  const std::size_t rest = state.size() / dim;
  Eigen::Map<const RowMatrix> in(moved.data().data(), static_cast<Eigen::Index>(dim),
                                 static_cast<Eigen::Index>(rest));
  Tensor out(moved.shape());
  Eigen::Map<RowMatrix> res(out.data().data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rest));
  res.noalias() = op * in;
  std::vector<std::size_t> inverse(L);
  for (std::size_t k = 0; k < L; ++k) inverse[perm[k]] = k;
  return out.permute(inverse);
}

Tensor Hamiltonian::apply(const Tensor& state) const {
  if (state.rank() != shape_.vertex_count()) throw DimensionError("state rank differs from the vertex count");
  Tensor out(state.shape());
  for (const auto& t : terms_) out += apply_local(state, t.support, t.matrix);
  return out;
}

Matrix Hamiltonian::dense() const {
  const std::size_t n = dimension();
  const std::size_t L = shape_.vertex_count();
  const std::size_t d = shape_.phys_dim();
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> place(L);
  for (std::size_t v = 0; v < L; ++v) {
    place[v] = 1;
    for (std::size_t w = v + 1; w < L; ++w) place[v] *= d;
  }
  for (const auto& t : terms_) {
    const std::size_t k = t.support.size();
    const auto m = static_cast<std::size_t>(t.matrix.rows());
    for (std::size_t x = 0; x < n; ++x) {
      std::size_t local = 0;
      std::size_t base = x;
      for (auto v : t.support) {
        const std::size_t digit = (x / place[v]) % d;
        local = local * d + digit;
        base -= digit * place[v];
      }
      for (std::size_t y = 0; y < m; ++y) {
        const cplx val = t.matrix(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(local));
        if (val == cplx{0.0, 0.0}) continue;
        std::size_t target = base;
        std::size_t rem = y;
        for (std::size_t i = k; i-- > 0;) {
          target += (rem % d) * place[t.support[i]];
          rem /= d;
        }
        h(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(x)) += val;
      }
    }
  }
  return h;
}

bool Hamiltonian::is_real() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const LocalTerm& t) { return t.matrix.imag().cwiseAbs().maxCoeff() == 0.0; });
}

bool Hamiltonian::is_diagonal() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const LocalTerm& t) {
    Matrix off = t.matrix;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() == 0.0;
  });
}

Eigen::VectorXd Hamiltonian::diagonal() const {
  const std::size_t n = dimension();
  const std::size_t L = shape_.vertex_count();
  const std::size_t d = shape_.phys_dim();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<std::size_t> digits(L);
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t rem = x;
    for (std::size_t v = L; v-- > 0;) {
      digits[v] = rem % d;
      rem /= d;
    }
    double acc = 0.0;
    for (const auto& t : terms_) {
      std::size_t local = 0;
      for (auto v : t.support) local = local * d + digits[v];
      acc += t.matrix(static_cast<Eigen::Index>(local), static_cast<Eigen::Index>(local)).real();
    }
    diag(static_cast<Eigen::Index>(x)) = acc;
  }
  return diag;
}

std::vector<Matrix> Hamiltonian::edge_operators() const {
  const auto d = static_cast<Eigen::Index>(shape_.phys_dim());
  std::vector<Matrix> ops(shape_.edge_count(), Matrix::Zero(d * d, d * d));
  const Matrix id = Matrix::Identity(d, d);
  for (const auto& t : terms_) {
    if (t.support.size() == 2) {
      auto e = shape_.edge_between(t.support[0], t.support[1]);
      if (!e) throw UnsupportedError("two-site term is not supported on an edge");
      if (shape_.edge(*e).first == t.support[0]) {
        ops[*e] += t.matrix;
      } else {
        // Swap the tensor factors so the first factor acts on the first endpoint.
        Matrix swapped(d * d, d * d);
        for (Eigen::Index i = 0; i < d; ++i)
          for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < d; ++k)
              for (Eigen::Index l = 0; l < d; ++l) swapped(i * d + j, k * d + l) = t.matrix(j * d + i, l * d + k);
        ops[*e] += swapped;
      }
    } else if (t.support.size() == 1) {
      const std::size_t v = t.support[0];
      if (shape_.degree(v) == 0) throw UnsupportedError("isolated vertex carries a term");
      const std::size_t e = shape_.incident(v).front();
      if (shape_.edge(e).first == v) {
        ops[e] += kron(t.matrix, id);
      } else {
        ops[e] += kron(id, t.matrix);
      }
    } else {
      throw UnsupportedError("only one- and two-site terms map onto edges");
    }
  }
  return ops;
}

std::vector<std::pair<Matrix, Matrix>> operator_schmidt(const Matrix& op, std::size_t d, double cutoff) {
  const auto n = static_cast<Eigen::Index>(d * d);
  if (op.rows() != n || op.cols() != n) throw DimensionError("operator is not two-site");
  // R[(s1, s1'), (s2, s2')] = op[(s1, s2), (s1', s2')]
  Tensor r({d, d, d, d});
  for (std::size_t s1 = 0; s1 < d; ++s1)
    for (std::size_t s2 = 0; s2 < d; ++s2)
      for (std::size_t t1 = 0; t1 < d; ++t1)
        for (std::size_t t2 = 0; t2 < d; ++t2)
          r({s1, t1, s2, t2}) = op(static_cast<Eigen::Index>(s1 * d + s2), static_cast<Eigen::Index>(t1 * d + t2));
  const SvdResult f = svd(r, {0, 1}, {2, 3}, std::nullopt, cutoff);
  std::vector<std::pair<Matrix, Matrix>> out;
  const auto dd = static_cast<Eigen::Index>(d);
  for (std::size_t l = 0; l < f.rank(); ++l) {
    const double w = std::sqrt(f.singular_values[l]);
    Matrix x(dd, dd);
    Matrix y(dd, dd);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w * f.left({i, j, l});
        y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w * f.right({l, i, j});
      }
    }
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

}  // namespace btns
