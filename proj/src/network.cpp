#include "btnslab/network.hpp"

#include "btnslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace btns {

namespace {

void check_maps(const NetworkShape& shape, const std::vector<Tensor>& maps, std::size_t weight_dim) {
  if (maps.size() != shape.vertex_count()) throw DimensionError("one map per vertex is required");
  for (std::size_t v = 0; v < maps.size(); ++v) {
    if (maps[v].shape() != shape.map_shape(v, weight_dim)) {
      throw DimensionError("map at vertex " + std::to_string(v) + " does not match the network shape");
    }
  }
}

std::size_t full_size(const NetworkShape& shape, std::size_t cap) {
  std::size_t n = 1;
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    n *= shape.phys_dim();
    if (n > cap) throw ResourceError("full state exceeds the amplitude cap of " + std::to_string(cap));
  }
  return n;
}

// Sum tensor on the weight counter: S[c, eta, c'] = [c' = c + eta].
Tensor counter_tensor(std::size_t a, std::size_t q) {
  Tensor s({a + 1, q, a + 1});
  for (std::size_t c = 0; c <= a; ++c) {
    for (std::size_t eta = 0; eta < q && c + eta <= a; ++eta) s({c, eta, c + eta}) = 1.0;
  }
  return s;
}

struct Partial {
  Tensor t;                     // (P, c, open...)
  std::vector<std::size_t> open;  // edge ids of the open axes
};

Partial absorb(const BTNSRep& rep, std::optional<std::size_t> skip) {
  const auto& shape = rep.shape;
  const auto a = static_cast<std::size_t>(rep.a);
  const Tensor counter = counter_tensor(a, rep.weight_dim());
  Partial part;
  part.t = Tensor({1, a + 1});
  part.t[0] = 1.0;
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    if (skip && *skip == v) continue;
    const Tensor& m = rep.maps[v];
    const std::size_t deg = shape.degree(v);
    // (phys, bonds..., c, c')
    const Tensor mc = contract(m, counter, {{deg + 1, 1}});
    std::vector<IndexPair> pairs{{1, deg + 1}};
    std::vector<std::size_t> remaining;
    std::vector<bool> closed_axis(part.open.size(), false);
    std::vector<std::size_t> fresh;
    for (std::size_t k = 0; k < deg; ++k) {
      const std::size_t e = shape.incident(v)[k];
      auto it = std::find(part.open.begin(), part.open.end(), e);
      if (it != part.open.end()) {
        const auto pos = static_cast<std::size_t>(it - part.open.begin());
        pairs.emplace_back(2 + pos, 1 + k);
        closed_axis[pos] = true;
      } else {
        fresh.push_back(e);
      }
    }
    for (std::size_t p = 0; p < part.open.size(); ++p) {
      if (!closed_axis[p]) remaining.push_back(part.open[p]);
    }
    // (P, remaining..., phys, fresh..., c')
    Tensor r = contract(part.t, mc, pairs);
    const std::size_t nr = remaining.size();
    const std::size_t nf = fresh.size();
    std::vector<std::size_t> perm{0, 1 + nr, 2 + nr + nf};
    for (std::size_t i = 0; i < nr; ++i) perm.push_back(1 + i);
    for (std::size_t i = 0; i < nf; ++i) perm.push_back(2 + nr + i);
    Tensor moved = r.permute(perm);
    Shape merged{moved.extent(0) * moved.extent(1)};
    for (std::size_t i = 2; i < moved.rank(); ++i) merged.push_back(moved.extent(i));
    part.t = std::move(moved).reshape(merged);
    part.open = remaining;
    part.open.insert(part.open.end(), fresh.begin(), fresh.end());
  }
  return part;
}

}  // namespace

void TNSRep::validate() const { check_maps(shape, maps, 0); }

void BTNSRep::validate() const {
  if (a < 0 || dloc < 0 || dloc > a) throw ArgumentError("bTNS needs 0 <= dloc <= a");
  check_maps(shape, maps, weight_dim());
}

void DegenerationCurve::validate() const {
  if (a < 0 || dloc < 0) throw ArgumentError("degeneration degrees must be non-negative");
  if (coeffs.size() != shape.vertex_count()) throw DimensionError("one coefficient list per vertex is required");
  for (std::size_t v = 0; v < coeffs.size(); ++v) {
    if (coeffs[v].size() != static_cast<std::size_t>(dloc) + 1) {
      throw DimensionError("each vertex needs dloc+1 coefficient maps");
    }
    for (const auto& c : coeffs[v]) {
      if (c.shape() != shape.map_shape(v)) throw DimensionError("coefficient map does not match the shape");
    }
  }
}

BTNSRep as_btns(const TNSRep& rep) {
  rep.validate();
  BTNSRep out;
  out.shape = rep.shape;
  for (const auto& m : rep.maps) {
    Shape s = m.shape();
    s.push_back(1);
    out.maps.push_back(m.reshape(s));
  }
  return out;
}

Tensor btns_evaluate(const BTNSRep& rep, std::size_t cap) {
  rep.validate();
  full_size(rep.shape, cap);
  Partial part = absorb(rep, std::nullopt);
  const std::size_t n = part.t.extent(0);
  const auto a = static_cast<std::size_t>(rep.a);
  Tensor out(Shape(rep.shape.vertex_count(), rep.shape.phys_dim()));
  if (out.size() != n || part.t.rank() != 2) throw NumericError("network contraction left open bonds");
  for (std::size_t x = 0; x < n; ++x) out[x] = part.t({x, a});
  return out;
}

Tensor tns_evaluate(const TNSRep& rep, std::size_t cap) { return btns_evaluate(as_btns(rep), cap); }

Tensor environment(const BTNSRep& rep, std::size_t skip, std::size_t cap) {
  rep.validate();
  full_size(rep.shape, cap);
  if (skip >= rep.shape.vertex_count()) throw ArgumentError("vertex out of range");
  Partial part = absorb(rep, skip);
  const auto& inc = rep.shape.incident(skip);
  std::vector<std::size_t> perm{0};
  for (auto e : inc) {
    auto it = std::find(part.open.begin(), part.open.end(), e);
    if (it == part.open.end()) throw NumericError("environment lost a bond of the removed vertex");
    perm.push_back(2 + static_cast<std::size_t>(it - part.open.begin()));
  }
  if (perm.size() != part.open.size() + 1) throw NumericError("environment has unexpected open bonds");
  perm.push_back(1);
  return part.t.permute(perm);
}

std::vector<Tensor> hole_overlaps(const BTNSRep& rep, const Tensor& y, std::size_t cap) {
  const std::size_t L = rep.shape.vertex_count();
  const std::size_t d = rep.shape.phys_dim();
  const auto a = static_cast<std::size_t>(rep.a);
  const std::size_t q = rep.weight_dim();
  if (y.shape() != Shape(L, d)) throw DimensionError("target state does not match the network");
  std::vector<Tensor> grads;
  for (std::size_t v = 0; v < L; ++v) {
    const Tensor env = environment(rep, v, cap);
    const std::size_t rest = env.extent(0);
    const std::size_t cols = env.size() / rest;
    std::vector<std::size_t> perm;
    for (std::size_t w = 0; w < L; ++w) {
      if (w != v) perm.push_back(w);
    }
    perm.push_back(v);
    const Matrix ymat = y.permute(perm).matrix(L - 1);
    const Matrix emat = env.matrix(1);
    const Matrix g = emat.adjoint() * ymat;  // ((bonds, c), phys)
    Tensor out(rep.shape.map_shape(v, q));
    const std::size_t bond_size = cols / (a + 1);
    for (std::size_t s = 0; s < d; ++s) {
      for (std::size_t b = 0; b < bond_size; ++b) {
        for (std::size_t eta = 0; eta < q && eta <= a; ++eta) {
          out[(s * bond_size + b) * q + eta] =
              g(static_cast<Eigen::Index>(b * (a + 1) + (a - eta)), static_cast<Eigen::Index>(s));
        }
      }
    }
    grads.push_back(std::move(out));
  }
  return grads;
}

TNSRep degeneration_evaluate(const DegenerationCurve& curve, cplx eps) {
  curve.validate();
  if (eps == cplx{0.0, 0.0}) throw ArgumentError("degenerations are not evaluated at eps = 0");
  TNSRep rep;
  rep.shape = curve.shape;
  for (const auto& coeffs : curve.coeffs) {
    Tensor m = coeffs[0];
    cplx p = 1.0;
    for (std::size_t eta = 1; eta < coeffs.size(); ++eta) {
      p *= eps;
      m += p * coeffs[eta];
    }
    rep.maps.push_back(std::move(m));
  }
  return rep;
}

BTNSRep degeneration_to_btns(const DegenerationCurve& curve) {
  curve.validate();
  BTNSRep rep;
  rep.shape = curve.shape;
  rep.a = curve.a;
  rep.dloc = curve.dloc;
  const std::size_t q = rep.weight_dim();
  for (std::size_t v = 0; v < curve.coeffs.size(); ++v) {
    Tensor m(curve.shape.map_shape(v, q));
    const std::size_t inner = curve.coeffs[v][0].size();
    for (std::size_t eta = 0; eta < q; ++eta) {
      for (std::size_t i = 0; i < inner; ++i) m[i * q + eta] = curve.coeffs[v][eta][i];
    }
    rep.maps.push_back(std::move(m));
  }
  return rep;
}

std::vector<Tensor> degeneration_expansion(const DegenerationCurve& curve, std::size_t cap) {
  curve.validate();
  const std::size_t degree = static_cast<std::size_t>(curve.dloc) * curve.shape.vertex_count();
  const cplx probe = std::polar(0.6, 0.7);
  const Tensor direct = tns_evaluate(degeneration_evaluate(curve, probe), cap);
  for (std::size_t n = degree + 1; n <= degree + 5; ++n) {
    std::vector<Tensor> samples;
    for (std::size_t m = 0; m < n; ++m) {
      const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
      samples.push_back(tns_evaluate(degeneration_evaluate(curve, z), cap));
    }
    std::vector<Tensor> coeffs;
    for (std::size_t j = 0; j < n; ++j) {
      Tensor c(direct.shape());
      for (std::size_t m = 0; m < n; ++m) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(m * j % n) / static_cast<double>(n);
        c += std::polar(1.0 / static_cast<double>(n), angle) * samples[m];
      }
      coeffs.push_back(std::move(c));
    }
    Tensor rebuilt(direct.shape());
    double scale = 0.0;
    cplx p = 1.0;
    for (const auto& c : coeffs) {
      rebuilt += p * c;
      scale += std::abs(p) * norm(c);
      p *= probe;
    }
    if (norm(rebuilt - direct) <= 1e-9 * std::max(scale, 1e-300)) {
      coeffs.resize(degree + 1);
      return coeffs;
    }
  }
  throw NumericError("polynomial fit of the degeneration did not reproduce the direct evaluation");
}

int DegenerationCurve::error_degree() const {
  const auto coeffs = degeneration_expansion(*this);
  double top = 0.0;
  for (const auto& c : coeffs) top = std::max(top, norm(c));
  int highest = 0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (norm(coeffs[j]) > 1e-12 * top) highest = static_cast<int>(j);
  }
  return highest - a;
}

double expectation_exact(const Tensor& state, const Hamiltonian& obs) {
  const double n = std::norm(norm(state));
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateStateError("expectation value of the zero state");
  const cplx e = inner(state, obs.apply(state)) / n;
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e))) {
    throw NumericError("expectation value of a Hermitian observable is not real");
  }
  return e.real();
}

double expectation_exact(const Tensor& state, const Matrix& obs) {
  const double n = std::norm(norm(state));
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateStateError("expectation value of the zero state");
  if (static_cast<std::size_t>(obs.rows()) != state.size() || obs.rows() != obs.cols()) {
    throw DimensionError("observable does not match the state");
  }
  Eigen::Map<const Eigen::VectorXcd> psi(state.data().data(), static_cast<Eigen::Index>(state.size()));
  const cplx e = psi.dot(obs * psi) / n;
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e))) {
    throw NumericError("expectation value of a Hermitian observable is not real");
  }
  return e.real();
}

namespace {

void fill_gaussian(Tensor& t, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  for (auto& x : t.data()) {
    const double re = g(rng);
    const double im = g(rng);
    x = cplx{re, im};
  }
}

}  // namespace

Tensor random_tensor(const Shape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor t(shape);
  fill_gaussian(t, rng);
  return t;
}

BTNSRep random_init(const NetworkShape& shape, int a, int dloc, std::uint64_t seed) {
  BTNSRep rep;
  rep.shape = shape;
  rep.a = a;
  rep.dloc = dloc;
  if (a < 0 || dloc < 0 || dloc > a) throw ArgumentError("bTNS needs 0 <= dloc <= a");
  std::mt19937_64 rng(seed);
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    Tensor m(shape.map_shape(v, rep.weight_dim()));
    fill_gaussian(m, rng);
    rep.maps.push_back(std::move(m));
  }
  return rep;
}

BTNSRep ti_expand(const NetworkShape& shape, int a, int dloc, const Tensor& shared) {
  if (shape.kind() != GraphKind::ring) throw UnsupportedError("translation invariant maps need a ring");
  BTNSRep rep;
  rep.shape = shape;
  rep.a = a;
  rep.dloc = dloc;
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    rep.maps.push_back(v == 0 ? shared.permute({0, 2, 1, 3}) : shared);
  }
  rep.validate();
  return rep;
}

Tensor ti_pull_back(const NetworkShape& shape, std::size_t v, const Tensor& map) {
  if (shape.kind() != GraphKind::ring) throw UnsupportedError("translation invariant maps need a ring");
  return v == 0 ? map.permute({0, 2, 1, 3}) : map;
}

BTNSRep random_init_ti(const NetworkShape& shape, int a, int dloc, std::uint64_t seed) {
  if (shape.kind() != GraphKind::ring) throw UnsupportedError("translation invariant maps need a ring");
  const std::size_t D = shape.bond(0);
  for (auto b : shape.bonds()) {
    if (b != D) throw ArgumentError("translation invariant maps need uniform bonds");
  }
  if (a < 0 || dloc < 0 || dloc > a) throw ArgumentError("bTNS needs 0 <= dloc <= a");
  const Tensor shared = random_tensor({shape.phys_dim(), D, D, static_cast<std::size_t>(dloc) + 1}, seed);
  return ti_expand(shape, a, dloc, shared);
}

}  // namespace btns
