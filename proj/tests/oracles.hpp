#pragma once

// Reference implementations written straight from the definitions. They are
// slow and only meant for small instances; none of them calls the library
// routine it is compared against.

#include "btnslab/hamiltonian.hpp"
#include "btnslab/network.hpp"
#include "btnslab/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using btns::cplx;
using State = std::vector<cplx>;

/// Digits of x in base d, most significant first.
inline std::vector<std::size_t> digits(std::size_t x, std::size_t d, std::size_t L) {
  std::vector<std::size_t> out(L);
  for (std::size_t k = L; k-- > 0;) {
    out[k] = x % d;
    x /= d;
  }
  return out;
}

inline std::size_t number(const std::vector<std::size_t>& dig, std::size_t d) {
  std::size_t x = 0;
  for (auto v : dig) x = x * d + v;
  return x;
}

inline std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

inline State flat(const btns::Tensor& t) { return State(t.values().begin(), t.values().end()); }

inline double norm(const State& s) {
  double acc = 0.0;
  for (const auto& x : s) acc += std::norm(x);
  return std::sqrt(acc);
}

inline cplx dot(const State& a, const State& b) {
  cplx acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[k];
  return acc;
}

inline double distance(const State& a, const State& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::norm(a[k] - b[k]);
  return std::sqrt(acc);
}

inline double fidelity(const State& a, const State& b) {
  return std::norm(dot(a, b)) / (std::pow(norm(a), 2) * std::pow(norm(b), 2));
}

/// Basis states whose digits are at most dloc and sum to a.
inline State weight_state(int a, int dloc, std::size_t L) {
  const std::size_t q = static_cast<std::size_t>(dloc) + 1;
  State out(ipow(q, L), 0.0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    std::size_t sum = 0;
    for (auto v : digits(x, q, L)) sum += v;
    if (sum == static_cast<std::size_t>(a)) out[x] = 1.0;
  }
  return out;
}

/// Stirling numbers of the second kind by the triangle recurrence.
inline std::int64_t stirling2(int n, int k) {
  std::vector<std::vector<std::int64_t>> s(n + 1, std::vector<std::int64_t>(n + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= i; ++j) s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
  }
  return k <= n ? s[n][k] : 0;
}

inline std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Sum over every bond and weight assignment of the product of map entries.
/// Weight assignments must sum to a.
inline State brute_btns(const btns::BTNSRep& rep) {
  const auto& g = rep.shape;
  const std::size_t L = g.vertex_count();
  const std::size_t d = g.phys_dim();
  const std::size_t q = rep.weight_dim();
  const std::size_t E = g.edge_count();
  State out(ipow(d, L), 0.0);
  std::size_t bond_configs = 1;
  for (std::size_t e = 0; e < E; ++e) bond_configs *= g.bond(e);
  const std::size_t weight_configs = ipow(q, L);
  for (std::size_t x = 0; x < out.size(); ++x) {
    const auto phys = digits(x, d, L);
    cplx total = 0.0;
    for (std::size_t wc = 0; wc < weight_configs; ++wc) {
      const auto eta = digits(wc, q, L);
      std::size_t sum = 0;
      for (auto v : eta) sum += v;
      if (sum != static_cast<std::size_t>(rep.a)) continue;
      for (std::size_t bc = 0; bc < bond_configs; ++bc) {
        std::vector<std::size_t> beta(E);
        std::size_t rest = bc;
        for (std::size_t e = 0; e < E; ++e) {
          beta[e] = rest % g.bond(e);
          rest /= g.bond(e);
        }
        cplx prod = 1.0;
        for (std::size_t v = 0; v < L && prod != 0.0; ++v) {
          std::vector<std::size_t> idx{phys[v]};
          for (auto e : g.incident(v)) idx.push_back(beta[e]);
          idx.push_back(eta[v]);
          prod *= rep.maps[v].at(idx);
        }
        total += prod;
      }
    }
    out[x] = total;
  }
  return out;
}

/// H psi, term by term, acting on the digits in the support.
inline State apply_h(const btns::Hamiltonian& H, const State& psi) {
  const std::size_t L = H.shape().vertex_count();
  const std::size_t d = H.shape().phys_dim();
  State out(psi.size(), 0.0);
  for (const auto& term : H.terms()) {
    const std::size_t k = term.support.size();
    for (std::size_t x = 0; x < psi.size(); ++x) {
      if (psi[x] == 0.0) continue;
      auto dig = digits(x, d, L);
      std::vector<std::size_t> local;
      for (auto s : term.support) local.push_back(dig[s]);
      const std::size_t col = number(local, d);
      for (std::size_t row = 0; row < ipow(d, k); ++row) {
        const cplx m = term.matrix(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
        if (m == 0.0) continue;
        const auto ld = digits(row, d, k);
        for (std::size_t j = 0; j < k; ++j) dig[term.support[j]] = ld[j];
        out[number(dig, d)] += m * psi[x];
      }
    }
  }
  return out;
}

inline double expectation(const btns::Hamiltonian& H, const State& psi) {
  return (dot(psi, apply_h(H, psi)) / dot(psi, psi)).real();
}

/// Dense matrix from apply_h on basis vectors; small systems only.
inline Eigen::MatrixXcd dense(const btns::Hamiltonian& H) {
  const std::size_t n = ipow(H.shape().phys_dim(), H.shape().vertex_count());
  Eigen::MatrixXcd m(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    State e(n, 0.0);
    e[c] = 1.0;
    const State col = apply_h(H, e);
    for (std::size_t r = 0; r < n; ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
  }
  return m;
}

inline double ground_energy(const btns::Hamiltonian& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense(H), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// (1/sqrt L) sum_k S^k |2 1 0 1 0 ... 1 0> on C^3.
inline State psi_sep(std::size_t L) {
  State out(ipow(3, L), 0.0);
  std::vector<std::size_t> base(L);
  base[0] = 2;
  for (std::size_t j = 1; j < L; ++j) base[j] = j % 2 == 1 ? 1 : 0;
  for (std::size_t k = 0; k < L; ++k) {
    std::vector<std::size_t> dig(L);
    for (std::size_t j = 0; j < L; ++j) dig[(j + k) % L] = base[j];
    out[number(dig, 3)] += 1.0 / std::sqrt(static_cast<double>(L));
  }
  return out;
}

/// The 17-term state on three sites of dimension 9.
inline State t_state() {
  const int kets[17] = {5, 16, 40, 126, 160, 227, 251, 262, 338, 373, 384, 430, 501, 632, 703, 714, 824};
  State out(729, 0.0);
  for (int k : kets) out[static_cast<std::size_t>((k / 100) * 81 + ((k / 10) % 10) * 9 + k % 10)] = 1.0 / std::sqrt(17.0);
  return out;
}

/// Squared distance of the normalized W degeneration from W/sqrt(L), first
/// form of the closed expression.
inline double w_distance_sq(std::size_t L, double eps) {
  const double l = static_cast<double>(L);
  return 2.0 * (1.0 - l * eps / std::sqrt(l * (std::pow(1.0 + eps * eps, l) - 1.0)));
}

/// Coefficients of the polynomial through (z_j, y_j) by a Vandermonde solve.
inline std::vector<cplx> vandermonde_fit(const std::vector<cplx>& z, const std::vector<cplx>& y) {
  const auto n = static_cast<Eigen::Index>(z.size());
  Eigen::MatrixXcd V(n, n);
  Eigen::VectorXcd rhs(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    cplx p = 1.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      V(r, c) = p;
      p *= z[static_cast<std::size_t>(r)];
    }
    rhs(r) = y[static_cast<std::size_t>(r)];
  }
  const Eigen::VectorXcd c = V.fullPivLu().solve(rhs);
  return std::vector<cplx>(c.data(), c.data() + n);
}

/// exp(-dt h) through a Taylor series with scaling and squaring.
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& h, double dt) {
  const Eigen::MatrixXcd a = -dt * h;
  int squarings = 0;
  double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.5) {
    nrm /= 2;
    ++squarings;
  }
  const Eigen::MatrixXcd s = a / std::pow(2.0, squarings);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
  Eigen::MatrixXcd sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * s / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

/// Central difference along a real or imaginary perturbation of one entry.
inline double central_difference(const std::function<double(const btns::BTNSRep&)>& f, const btns::BTNSRep& rep,
                                 std::size_t v, std::size_t x, cplx dir, double h) {
  btns::BTNSRep plus = rep;
  btns::BTNSRep minus = rep;
  plus.maps[v][x] += h * dir;
  minus.maps[v][x] -= h * dir;
  return (f(plus) - f(minus)) / (2 * h);
}

}  // namespace oracle
