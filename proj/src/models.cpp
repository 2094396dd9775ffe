#include "btnslab/models.hpp"

#include "btnslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace btns {

namespace {

Matrix pauli(char which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case 'x':
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 'y':
      m(0, 1) = cplx{0.0, -1.0};
      m(1, 0) = cplx{0.0, 1.0};
      break;
    default:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
  }
  return m;
}

/// Map of vertex v in network order from a ring map in (physical, left,
/// right[, weight]) order.
Tensor ring_map(std::size_t v, const Tensor& lr) {
  if (v != 0) return lr;
  return lr.rank() == 4 ? lr.permute({0, 2, 1, 3}) : lr.permute({0, 2, 1});
}

/// Slice of a bTNS map at weight index eta.
Tensor weight_slice(const Tensor& map, std::size_t eta) {
  const std::size_t q = map.shape().back();
  Shape s(map.shape().begin(), map.shape().end() - 1);
  Tensor out(s);
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = map[x * q + eta];
  return out;
}

DegenerationCurve curve_from_btns(const BTNSRep& rep) {
  DegenerationCurve c;
  c.shape = rep.shape;
  c.a = rep.a;
  c.dloc = rep.dloc;
  for (const auto& m : rep.maps) {
    std::vector<Tensor> per;
    for (std::size_t eta = 0; eta < rep.weight_dim(); ++eta) per.push_back(weight_slice(m, eta));
    c.coeffs.push_back(std::move(per));
  }
  c.validate();
  return c;
}

void normalize(Tensor& t) {
  const double n = norm(t);
  if (!(n > 0.0)) throw NumericError("reference state vanished");
  t *= 1.0 / n;
}

std::size_t flat_index(const std::vector<std::size_t>& digits, std::size_t d) {
  std::size_t x = 0;
  for (auto s : digits) x = x * d + s;
  return x;
}

}  // namespace

Hamiltonian heisenberg_ring(std::size_t L) {
  Hamiltonian h(ring(L, 1, 2));
  const Matrix term = kron(pauli('x'), pauli('x')) + kron(pauli('y'), pauli('y')) + kron(pauli('z'), pauli('z'));
  for (std::size_t i = 0; i < L; ++i) h.add({i, (i + 1) % L}, term);
  return h;
}

Matrix separation_projector() {
  Matrix p = Matrix::Zero(9, 9);
  for (auto [x, y] : {std::pair{0, 1}, {1, 0}, {0, 2}, {2, 1}}) p(3 * x + y, 3 * x + y) = 1.0;
  return p;
}

Hamiltonian separation_hamiltonian(std::size_t L) {
  if (L < 5 || L % 2 == 0) throw ArgumentError("separation Hamiltonian needs odd L >= 5");
  Hamiltonian h(ring(L, 1, 3));
  const Matrix two = Matrix::Identity(9, 9) - separation_projector();
  Matrix one = Matrix::Zero(3, 3);
  one(2, 2) = 1.0 / (2.0 * static_cast<double>(L));
  for (std::size_t i = 0; i < L; ++i) {
    h.add({i, (i + 1) % L}, two);
    h.add({i}, one);
  }
  return h;
}

Tensor cyclic_shift(const Tensor& state) {
  const std::size_t L = state.rank();
  if (L == 0) return state;
  std::vector<std::size_t> perm(L);
  for (std::size_t k = 0; k < L; ++k) perm[k] = (k + 1) % L;
  return state.permute(perm);
}

KnownState psi_state(std::size_t L) {
  if (L < 5 || L % 2 == 0) throw ArgumentError("psi_L needs odd L >= 5");
  KnownState k;
  k.name = "separation";
  Tensor base(Shape(L, 3));
  std::vector<std::size_t> digits(L, 0);
  digits[0] = 2;
  for (std::size_t i = 1; i < L; ++i) digits[i] = i % 2;
  base[flat_index(digits, 3)] = 1.0;
  Tensor state = base;
  Tensor shifted = base;
  for (std::size_t i = 1; i < L; ++i) {
    shifted = cyclic_shift(shifted);
    state += shifted;
  }
  normalize(state);
  k.state = std::move(state);

  const NetworkShape shape = ring(L, 2, 3);
  Tensor shared({3, 2, 2, 2});
  shared({0, 1, 0, 0}) = 1.0;
  shared({1, 0, 1, 0}) = 1.0;
  shared({2, 0, 0, 1}) = 1.0;
  k.btns = ti_expand(shape, 1, 1, shared);
  k.degeneration = curve_from_btns(*k.btns);
  k.known_bbond = 2;
  k.notes = "translation invariant border bond dimension 2 with a = dloc = 1; translation invariant bond dimension "
            "grows as Omega(L^{1/3} / log L)";
  return k;
}

KnownState t_state() {
  KnownState k;
  k.name = "tstate";
  Tensor t({9, 9, 9});
  for (const char* term : {"005", "016", "040", "126", "160", "227", "251", "262", "338", "373", "384", "430", "501",
                           "632", "703", "714", "824"}) {
    t({static_cast<std::size_t>(term[0] - '0'), static_cast<std::size_t>(term[1] - '0'),
       static_cast<std::size_t>(term[2] - '0')}) = 1.0;
  }
  normalize(t);
  k.state = std::move(t);

  using Entries = std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::size_t>>;
  auto lr_map = [](const Entries& eta0, const Entries& eta1) {
    Tensor m({9, 3, 3, 2});
    for (const auto& [rc, s] : eta0) m({s, rc.first, rc.second, 0}) = 1.0;
    for (const auto& [rc, s] : eta1) m({s, rc.first, rc.second, 1}) = 1.0;
    return m;
  };
  const Entries a0_12{{{0, 0}, 0}, {{0, 1}, 1}, {{1, 1}, 2}, {{2, 2}, 3}};
  const Entries a0_3{{{0, 1}, 1}, {{0, 2}, 3}, {{1, 2}, 4}, {{2, 0}, 0}, {{2, 1}, 2}};
  const Entries a1_12{{{0, 2}, 4}, {{1, 0}, 5}, {{1, 2}, 6}, {{2, 0}, 7}, {{2, 1}, 8}};
  const Entries a1_3{{{0, 0}, 5}, {{1, 0}, 6}, {{1, 1}, 7}, {{2, 2}, 8}};
  BTNSRep rep;
  rep.shape = ring(3, 3, 9);
  rep.a = 1;
  rep.dloc = 1;
  rep.maps.push_back(ring_map(0, lr_map(a0_12, a1_12)));
  rep.maps.push_back(ring_map(1, lr_map(a0_12, a1_12)));
  rep.maps.push_back(ring_map(2, lr_map(a0_3, a1_3)));
  rep.validate();
  k.degeneration = curve_from_btns(rep);
  k.btns = std::move(rep);
  k.known_bbond = 3;
  k.known_bond = 4;
  k.notes = "border bond dimension 3 with approximation degree 1; bond dimension at least 4 and at most 9";
  return k;
}

KnownState w_state(std::size_t L) {
  if (L < 3) throw ArgumentError("W state on a ring needs L >= 3");
  KnownState k;
  k.name = "wstate";
  Tensor w(Shape(L, 2));
  std::vector<std::size_t> digits(L, 0);
  for (std::size_t i = 0; i < L; ++i) {
    digits.assign(L, 0);
    digits[i] = 1;
    w[flat_index(digits, 2)] = 1.0;
  }
  normalize(w);
  k.state = std::move(w);

  const cplx omega = std::polar(1.0, std::numbers::pi / static_cast<double>(L));
  Tensor m({2, 2, 2, 2});
  m({0, 0, 0, 0}) = 1.0;
  m({0, 1, 1, 0}) = omega;
  m({1, 0, 0, 1}) = 1.0;
  k.btns = ti_expand(ring(L, 2, 2), 1, 1, m);
  k.degeneration = curve_from_btns(*k.btns);
  k.known_bbond = 2;
  k.notes = "border bond dimension 2 with approximation degree 1; the bond dimension grows with L";
  return k;
}

KnownState ghz3() {
  KnownState k;
  k.name = "ghz3";
  Tensor g({3, 3, 3});
  for (std::size_t s = 0; s < 3; ++s) g({s, s, s}) = 1.0;
  normalize(g);
  k.state = std::move(g);
  TNSRep rep;
  rep.shape = ring(3, 3, 3);
  for (std::size_t v = 0; v < 3; ++v) {
    Tensor m({3, 3, 3});
    for (std::size_t s = 0; s < 3; ++s) m({s, s, s}) = 1.0;
    rep.maps.push_back(std::move(m));
  }
  k.btns = as_btns(rep);
  k.known_bbond = 2;
  k.known_bond = 3;
  k.notes = "border bond dimension 2 (Strassen); bond dimension 3";
  return k;
}

BTNSRep padded_psi_rep(std::size_t L) {
  if (L < 5 || L % 2 == 0) throw ArgumentError("psi_L needs odd L >= 5");
  Tensor shared({3, 4, 4, 2});
  shared({0, 1, 0, 0}) = 1.0;
  shared({1, 0, 1, 0}) = 1.0;
  shared({2, 0, 0, 1}) = 1.0;
  shared({2, 2, 2, 1}) = 2.0;
  shared({2, 3, 3, 1}) = 2.0;
  return ti_expand(ring(L, 4, 3), 1, 1, shared);
}

EdResult ed_ground_state(const Hamiltonian& H, std::size_t cap) {
  const std::size_t n = H.dimension();
  const NetworkShape& shape = H.shape();
  const std::size_t L = shape.vertex_count();
  const std::size_t d = shape.phys_dim();
  Shape tshape(L, d);
  EdResult res;
  Matrix v;  // ground space basis, n x g
  if (H.is_diagonal()) {
    if (n > (std::size_t{1} << 24)) throw ResourceError("diagonal too large");
    const Eigen::VectorXd diag = H.diagonal();
    res.energy = diag.minCoeff();
    const double tol = 1e-9 * std::max(1.0, std::abs(res.energy));
    std::vector<Eigen::Index> ground;
    for (Eigen::Index x = 0; x < diag.size(); ++x) {
      if (diag(x) <= res.energy + tol) ground.push_back(x);
    }
    if (ground.size() > cap) throw ResourceError("ground space too large for the shift analysis");
    v = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ground.size()));
    for (std::size_t k = 0; k < ground.size(); ++k) v(ground[k], static_cast<Eigen::Index>(k)) = 1.0;
  } else {
    if (n > cap) throw ResourceError("Hilbert space exceeds the dense cap");
    const Matrix dense = H.dense();
    Eigen::VectorXd evals;
    Matrix evecs;
    if (H.is_real()) {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense.real());
      evals = es.eigenvalues();
      evecs = es.eigenvectors().cast<cplx>();
    } else {
      const Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
      evals = es.eigenvalues();
      evecs = es.eigenvectors();
    }
    res.energy = evals(0);
    const double tol = 1e-9 * std::max(1.0, std::abs(res.energy));
    Eigen::Index g = 0;
    while (g < evals.size() && evals(g) <= res.energy + tol) ++g;
    v = evecs.leftCols(g);
  }
  res.degeneracy = static_cast<std::size_t>(v.cols());

  // Shift restricted to the ground space.
  Matrix sv(v.rows(), v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    std::vector<cplx> col(v.col(c).data(), v.col(c).data() + v.rows());
    const Tensor shifted = cyclic_shift(Tensor(tshape, std::move(col)));
    for (Eigen::Index r = 0; r < v.rows(); ++r) sv(r, c) = shifted[static_cast<std::size_t>(r)];
  }
  const Matrix m = v.adjoint() * sv - Matrix::Identity(v.cols(), v.cols());
  const Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  std::size_t null_dim = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) < 1e-8) ++null_dim;
  }
  res.ti_dimension = null_dim;
  res.ti_unique = null_dim == 1;
  Eigen::VectorXcd psi = null_dim > 0 ? Eigen::VectorXcd(v * svd.matrixV().col(v.cols() - 1)) : Eigen::VectorXcd(v.col(0));
  psi.normalize();
  res.state = Tensor(tshape, std::vector<cplx>(psi.data(), psi.data() + psi.size()));
  return res;
}

std::vector<TradeoffRow> approximation_tradeoff(const DegenerationCurve& curve, const std::vector<double>& eps_grid) {
  curve.validate();
  const std::vector<Tensor> psis = degeneration_expansion(curve);
  const auto a = static_cast<std::size_t>(curve.a);
  if (psis.size() <= a) throw ArgumentError("curve has no term of order a");
  const double scale = norm(psis[a]);
  if (!(scale > 0.0)) throw ArgumentError("limit state of the curve vanishes");
  for (std::size_t k = 0; k < a; ++k) {
    if (norm(psis[k]) > 1e-8 * scale) throw ArgumentError("curve does not vanish to order a");
  }
  const Tensor phi0 = (1.0 / scale) * psis[a];
  std::vector<double> phi_norms;
  for (std::size_t l = a + 1; l < psis.size(); ++l) phi_norms.push_back(norm(psis[l]) / scale);

  std::vector<TradeoffRow> rows;
  for (const double eps : eps_grid) {
    if (!(eps > 0.0)) throw ArgumentError("eps grid must be positive");
    TradeoffRow row;
    row.eps = eps;
    const Tensor psi = tns_evaluate(degeneration_evaluate(curve, eps));
    row.norm = norm(psi);
    if (!(row.norm > 0.0)) throw NumericError("curve state vanished");
    row.distance = norm((1.0 / row.norm) * psi - phi0);
    double p = eps;
    for (double f : phi_norms) {
      row.tau += p * f;
      p *= eps;
    }
    row.bound = 4.0 * row.tau;
    row.flagged = row.tau > 0.5;
    if (!row.flagged && row.distance > row.bound * (1.0 + 1e-9) + 1e-12) {
      throw NumericError("distance exceeds 4 tau at eps = " + std::to_string(eps));
    }
    rows.push_back(row);
  }
  return rows;
}

double w_degeneration_distance_sq(std::size_t L, double eps) {
  const double n = std::pow(1.0 + eps * eps, static_cast<double>(L)) - 1.0;
  return 2.0 * (std::sqrt(n) - std::sqrt(static_cast<double>(L)) * eps) / std::sqrt(n);
}

std::vector<ModelInfo> list_models() {
  return {
      {"heisenberg", "isotropic Heisenberg ring, d = 2", true},
      {"separation", "separation Hamiltonian on an odd ring, d = 3, with its ground state psi_L", true},
      {"tstate", "17-term state on the 3-ring, d = 9", false},
      {"wstate", "W state on a ring, d = 2", false},
      {"ghz3", "level-three GHZ state on the 3-ring", false},
  };
}

Hamiltonian model_hamiltonian(const std::string& name, std::size_t L) {
  if (name == "heisenberg") return heisenberg_ring(L);
  if (name == "separation") return separation_hamiltonian(L);
  for (const auto& m : list_models()) {
    if (m.name == name) throw UnsupportedError("model '" + name + "' has no Hamiltonian");
  }
  throw ArgumentError("unknown model '" + name + "'");
}

KnownState model_state(const std::string& name, std::size_t L) {
  if (name == "separation") return psi_state(L);
  if (name == "tstate") {
    if (L != 0 && L != 3) throw ArgumentError("tstate lives on the 3-ring");
    return t_state();
  }
  if (name == "wstate") return w_state(L);
  if (name == "ghz3") {
    if (L != 0 && L != 3) throw ArgumentError("ghz3 lives on the 3-ring");
    return ghz3();
  }
  if (name == "heisenberg") throw UnsupportedError("model 'heisenberg' has no recorded state");
  throw ArgumentError("unknown model '" + name + "'");
}

}  // namespace btns
