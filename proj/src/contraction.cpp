#include "btnslab/contraction.hpp"

#include "btnslab/errors.hpp"
#include "btnslab/weight_states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace btns {

InterpolationPlan make_plan(std::size_t L, int dloc, int a, std::optional<std::size_t> k) {
  if (a < 0 || dloc < 0) throw ArgumentError("weight parameters must be non-negative");
  const long bound = 2 * (static_cast<long>(L) * dloc - a);
  if (bound < 0) throw ArgumentError("weight exceeds L * dloc; the weight state vanishes");
  InterpolationPlan plan;
  plan.degree_bound = static_cast<std::size_t>(bound);
  plan.scale_degree = 2 * a;
  plan.k = k.value_or(plan.degree_bound + 1);
  if (plan.k < plan.degree_bound + 1) {
    throw ArgumentError("interpolation needs at least 2(L dloc - a) + 1 nodes");
  }
  for (std::size_t j = 0; j < plan.k; ++j) {
    plan.nodes.push_back(std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(plan.k)));
  }
  return plan;
}

InterpolationPlan make_plan(const BTNSRep& rep, std::optional<std::size_t> k) {
  return make_plan(rep.shape.vertex_count(), rep.dloc, rep.a, k);
}

cplx stable_interpolate(std::span<const cplx> samples, int scale_degree) {
  if (samples.empty()) throw ArgumentError("interpolation needs at least one sample");
  const auto k = static_cast<long>(samples.size());
  cplx acc{0.0, 0.0};
  for (long j = 0; j < k; ++j) {
    long e = (-static_cast<long>(scale_degree) * j) % k;
    if (e < 0) e += k;
    acc += std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(k)) *
           samples[static_cast<std::size_t>(j)];
  }
  return acc / static_cast<double>(k);
}

MpsEmbedding::MpsEmbedding(const NetworkShape& shape, int a, int dloc, const PathCover& path)
    : shape_(shape), embedded_(shape), a_(a), dloc_(dloc) {
  if (a < 0 || dloc < 0 || dloc > a) throw ArgumentError("embedding needs 0 <= dloc <= a");
  const std::size_t L = shape.vertex_count();
  if (!valid_path(shape, path)) throw ArgumentError("path does not cover the graph");
  if (path.vertices.size() != L || path.max_multiplicity() > 1) {
    throw ArgumentError("the embedding needs a path visiting every vertex once");
  }
  const auto A = static_cast<std::size_t>(a) + 1;
  const auto q = static_cast<std::size_t>(dloc) + 1;
  for (std::size_t e = 0; e < shape.edge_count(); ++e) {
    if (path.edge_multiplicity[e] == 1) embedded_.set_bond(e, shape.bond(e) * A);
  }
  plans_.resize(L);
  for (std::size_t k = 0; k < L; ++k) {
    const std::size_t v = path.vertices[k];
    std::optional<std::size_t> in_edge;
    std::optional<std::size_t> out_edge;
    if (k > 0) in_edge = shape.edge_between(path.vertices[k - 1], v);
    if (k + 1 < L) out_edge = shape.edge_between(v, path.vertices[k + 1]);
    const std::size_t win = in_edge ? A : 1;
    const std::size_t wout = out_edge ? A : 1;
    Tensor w({win, q, wout});
    for (std::size_t i = 0; i < win; ++i) {
      for (std::size_t eta = 0; eta < q; ++eta) {
        const std::size_t total = i + eta;
        if (total > static_cast<std::size_t>(a)) continue;
        if (out_edge) {
          w({i, eta, total}) = 1.0;
        } else if (total == static_cast<std::size_t>(a)) {
          w({i, eta, 0}) = 1.0;
        }
      }
    }
    const std::size_t deg = shape.degree(v);
    std::vector<std::size_t> perm{0};
    for (std::size_t b = 0; b < deg; ++b) {
      const std::size_t e = shape.incident(v)[b];
      perm.push_back(1 + b);
      if (in_edge && e == *in_edge) perm.push_back(deg + 1);
      if (out_edge && e == *out_edge) perm.push_back(deg + 2);
    }
    if (!in_edge) perm.push_back(deg + 1);
    if (!out_edge) perm.push_back(deg + 2);
    Shape full = shape.map_shape(v);
    full.push_back(win);
    full.push_back(wout);
    Shape split;
    for (auto p : perm) split.push_back(full[p]);
    plans_[v] = {std::move(w), std::move(perm), std::move(split), embedded_.map_shape(v)};
  }
}

Tensor MpsEmbedding::embed_map(std::size_t v, const Tensor& map) const {
  const auto& plan = plans_.at(v);
  const std::size_t deg = shape_.degree(v);
  if (map.shape() != shape_.map_shape(v, static_cast<std::size_t>(dloc_) + 1)) {
    throw DimensionError("map does not match the embedding");
  }
  const Tensor t = contract(map, plan.weight, {{deg + 1, 1}});
  return t.permute(plan.perm).reshape(plan.merged_shape);
}

Tensor MpsEmbedding::pull_back(std::size_t v, const Tensor& grad) const {
  const auto& plan = plans_.at(v);
  const std::size_t deg = shape_.degree(v);
  if (grad.shape() != plan.merged_shape) throw DimensionError("gradient does not match the embedded map");
  std::vector<std::size_t> inverse(plan.perm.size());
  for (std::size_t k = 0; k < plan.perm.size(); ++k) inverse[plan.perm[k]] = k;
  const Tensor t = grad.reshape(plan.split_shape).permute(inverse);
  return contract(t, plan.weight, {{deg + 1, 0}, {deg + 2, 2}});
}

TNSRep MpsEmbedding::embed(const BTNSRep& rep) const {
  rep.validate();
  if (rep.a != a_ || rep.dloc != dloc_ || !(rep.shape == shape_)) {
    throw ArgumentError("representation does not match the embedding");
  }
  TNSRep out;
  out.shape = embedded_;
  for (std::size_t v = 0; v < rep.maps.size(); ++v) out.maps.push_back(embed_map(v, rep.maps[v]));
  return out;
}

TNSRep embed_mps_strategy(const BTNSRep& rep, const PathCover& path) {
  return MpsEmbedding(rep.shape, rep.a, rep.dloc, path).embed(rep);
}

namespace {

struct SiteAxes {
  std::optional<std::size_t> left;
  std::optional<std::size_t> right;
};

SiteAxes site_edges(const NetworkShape& shape, std::size_t v) {
  const std::size_t L = shape.vertex_count();
  SiteAxes s;
  if (shape.kind() == GraphKind::ring) {
    s.left = v == 0 ? L - 1 : v - 1;
    s.right = v;
  } else if (shape.kind() == GraphKind::chain) {
    if (v > 0) s.left = v - 1;
    if (v + 1 < L) s.right = v;
  } else {
    throw UnsupportedError("transfer matrices need a ring or a chain");
  }
  return s;
}

void check_compatible(const TNSRep& bra, const TNSRep& ket) {
  if (bra.shape.kind() != ket.shape.kind() || bra.shape.vertex_count() != ket.shape.vertex_count() ||
      bra.shape.phys_dim() != ket.shape.phys_dim()) {
    throw ArgumentError("bra and ket live on different networks");
  }
}

}  // namespace

std::vector<Tensor> mps_sites(const TNSRep& rep) {
  rep.validate();
  std::vector<Tensor> sites;
  const auto& shape = rep.shape;
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    const SiteAxes ax = site_edges(shape, v);
    std::vector<std::size_t> perm{0};
    if (ax.left) perm.push_back(shape.bond_axis(v, *ax.left));
    if (ax.right) perm.push_back(shape.bond_axis(v, *ax.right));
    const std::size_t l = ax.left ? shape.bond(*ax.left) : 1;
    const std::size_t r = ax.right ? shape.bond(*ax.right) : 1;
    sites.push_back(rep.maps[v].permute(perm).reshape({shape.phys_dim(), l, r}));
  }
  return sites;
}

Tensor site_to_map(const NetworkShape& shape, std::size_t v, const Tensor& site) {
  const SiteAxes ax = site_edges(shape, v);
  std::vector<std::size_t> perm{0};
  Shape s{shape.phys_dim()};
  if (ax.left) {
    perm.push_back(shape.bond_axis(v, *ax.left));
    s.push_back(shape.bond(*ax.left));
  }
  if (ax.right) {
    perm.push_back(shape.bond_axis(v, *ax.right));
    s.push_back(shape.bond(*ax.right));
  }
  std::vector<std::size_t> inverse(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inverse[perm[k]] = k;
  return site.reshape(s).permute(inverse);
}

Matrix transfer_matrix(const Tensor& bra_site, const Tensor& ket_site) {
  const std::size_t d = bra_site.extent(0);
  if (ket_site.extent(0) != d) throw DimensionError("sites have different physical dimensions");
  const auto lb = static_cast<Eigen::Index>(bra_site.extent(1));
  const auto rb = static_cast<Eigen::Index>(bra_site.extent(2));
  const auto lk = static_cast<Eigen::Index>(ket_site.extent(1));
  const auto rk = static_cast<Eigen::Index>(ket_site.extent(2));
  Matrix e = Matrix::Zero(lb * lk, rb * rk);
  const std::size_t bs = bra_site.size() / d;
  const std::size_t ks = ket_site.size() / d;
  for (std::size_t s = 0; s < d; ++s) {
    Eigen::Map<const RowMatrix> b(bra_site.data().data() + s * bs, lb, rb);
    Eigen::Map<const RowMatrix> k(ket_site.data().data() + s * ks, lk, rk);
    for (Eigen::Index i = 0; i < lb; ++i) {
      for (Eigen::Index j = 0; j < rb; ++j) {
        const cplx c = std::conj(b(i, j));
        if (c == cplx{0.0, 0.0}) continue;
        e.block(i * lk, j * rk, lk, rk) += c * k;
      }
    }
  }
  return e;
}

namespace {

/// Derivative of tr(X E(bra, ket)) with respect to conj(bra) for one site,
/// where X has rows (r_bra, r_ket) and columns (l_bra, l_ket).
Tensor extract_hole(const Matrix& x, const Tensor& ket, std::size_t lb, std::size_t rb) {
  const std::size_t d = ket.extent(0);
  const std::size_t lk = ket.extent(1);
  const std::size_t rk = ket.extent(2);
  Tensor g({d, lb, rb});
  for (std::size_t s = 0; s < d; ++s) {
    Eigen::Map<const RowMatrix> k(ket.data().data() + s * lk * rk, static_cast<Eigen::Index>(lk),
                                  static_cast<Eigen::Index>(rk));
    for (std::size_t i = 0; i < lb; ++i) {
      for (std::size_t j = 0; j < rb; ++j) {
        const auto blk = x.block(static_cast<Eigen::Index>(j * rk), static_cast<Eigen::Index>(i * lk),
                                 static_cast<Eigen::Index>(rk), static_cast<Eigen::Index>(lk));
        g({s, i, j}) = (blk.transpose().array() * k.array()).sum();
      }
    }
  }
  return g;
}

}  // namespace

SiteHoles mps_holes(const std::vector<Tensor>& bra, const std::vector<Tensor>& ket, bool want_holes) {
  const std::size_t L = bra.size();
  if (ket.size() != L || L == 0) throw ArgumentError("bra and ket need the same number of sites");
  std::vector<Matrix> e(L);
  for (std::size_t v = 0; v < L; ++v) e[v] = transfer_matrix(bra[v], ket[v]);
  std::vector<Matrix> prefix(L + 1);
  prefix[0] = Matrix::Identity(e[0].rows(), e[0].rows());
  for (std::size_t v = 0; v < L; ++v) prefix[v + 1] = prefix[v] * e[v];
  SiteHoles out;
  out.value = prefix[L].trace();
  if (!want_holes) return out;
  std::vector<Matrix> suffix(L + 1);
  suffix[L] = Matrix::Identity(e[L - 1].cols(), e[L - 1].cols());
  for (std::size_t v = L; v-- > 0;) suffix[v] = e[v] * suffix[v + 1];
  for (std::size_t v = 0; v < L; ++v) {
    const Matrix x = suffix[v + 1] * prefix[v];
    out.holes.push_back(extract_hole(x, ket[v], bra[v].extent(1), bra[v].extent(2)));
  }
  return out;
}

namespace {

Tensor apply_site_operator(const Tensor& site, const Matrix& op) {
  const std::size_t d = site.extent(0);
  if (static_cast<std::size_t>(op.rows()) != d || op.rows() != op.cols()) {
    throw DimensionError("site operator does not match the physical dimension");
  }
  const Tensor t = Tensor::from_matrix(op, {d, d});
  return contract(t, site, {{1, 0}});
}

}  // namespace

SiteHoles hamiltonian_holes(const std::vector<Tensor>& bra, const std::vector<Tensor>& ket, const Hamiltonian& obs,
                            bool want_holes) {
  const std::size_t L = bra.size();
  if (ket.size() != L || L != obs.shape().vertex_count()) throw ArgumentError("sites do not match the observable");
  const std::size_t d = obs.shape().phys_dim();
  SiteHoles out;
  if (want_holes) {
    for (std::size_t v = 0; v < L; ++v) out.holes.emplace_back(Shape{d, bra[v].extent(1), bra[v].extent(2)});
  }
  auto add = [&](const SiteHoles& h) {
    out.value += h.value;
    for (std::size_t v = 0; v < h.holes.size(); ++v) out.holes[v] += h.holes[v];
  };

  bool adjacent = L >= 2;
  for (const auto& t : obs.terms()) {
    if (t.support.size() > 2) adjacent = false;
    if (t.support.size() == 2 && t.support[1] != (t.support[0] + 1) % L && t.support[0] != (t.support[1] + 1) % L) {
      adjacent = false;
    }
  }
  std::vector<Matrix> edge_ops;
  if (adjacent) {
    try {
      edge_ops = obs.edge_operators();
    } catch (const UnsupportedError&) {
      adjacent = false;
    }
  }
  if (adjacent) {
    for (std::size_t e = 0; e < edge_ops.size(); ++e) {
      const auto [i, j] = obs.shape().edge(e);
      if (j != (i + 1) % L) adjacent = false;
    }
  }
  if (!adjacent) {
    for (const auto& term : obs.terms()) {
      if (term.support.size() == 1) {
        auto kk = ket;
        kk[term.support[0]] = apply_site_operator(ket[term.support[0]], term.matrix);
        add(mps_holes(bra, kk, want_holes));
      } else if (term.support.size() == 2) {
        for (const auto& [x, y] : operator_schmidt(term.matrix, d)) {
          auto kk = ket;
          kk[term.support[0]] = apply_site_operator(ket[term.support[0]], x);
          kk[term.support[1]] = apply_site_operator(ket[term.support[1]], y);
          add(mps_holes(bra, kk, want_holes));
        }
      } else {
        throw UnsupportedError("transfer matrix overlaps handle one- and two-site terms");
      }
    }
    return out;
  }

  std::vector<Matrix> e(L);
  for (std::size_t v = 0; v < L; ++v) e[v] = transfer_matrix(bra[v], ket[v]);
  for (std::size_t k = 0; k < edge_ops.size(); ++k) {
    const auto [i, j] = obs.shape().edge(k);
    const auto factors = operator_schmidt(edge_ops[k], d);
    if (factors.empty()) continue;
    std::vector<Tensor> xk;
    std::vector<Tensor> yk;
    std::vector<Matrix> ex;
    std::vector<Matrix> ey;
    Matrix m = Matrix::Zero(e[i].rows(), e[j].cols());
    for (const auto& [x, y] : factors) {
      xk.push_back(apply_site_operator(ket[i], x));
      yk.push_back(apply_site_operator(ket[j], y));
      ex.push_back(transfer_matrix(bra[i], xk.back()));
      ey.push_back(transfer_matrix(bra[j], yk.back()));
      m += ex.back() * ey.back();
    }
    // Cyclic sequence M, E_{j+1}, ..., E_{i-1}.
    std::vector<std::size_t> rest;
    for (std::size_t v = (j + 1) % L; v != i; v = (v + 1) % L) rest.push_back(v);
    const std::size_t n = rest.size() + 1;
    std::vector<const Matrix*> seq{&m};
    for (auto v : rest) seq.push_back(&e[v]);
    std::vector<Matrix> prefix(n + 1);
    prefix[0] = Matrix::Identity(m.rows(), m.rows());
    for (std::size_t s = 0; s < n; ++s) prefix[s + 1] = prefix[s] * *seq[s];
    out.value += prefix[n].trace();
    if (!want_holes) continue;
    std::vector<Matrix> suffix(n + 1);
    suffix[n] = Matrix::Identity(seq[n - 1]->cols(), seq[n - 1]->cols());
    for (std::size_t s = n; s-- > 0;) suffix[s] = *seq[s] * suffix[s + 1];
    for (std::size_t s = 1; s < n; ++s) {
      const std::size_t v = rest[s - 1];
      const Matrix x = suffix[s + 1] * prefix[s];
      out.holes[v] += extract_hole(x, ket[v], bra[v].extent(1), bra[v].extent(2));
    }
    const Matrix& r = suffix[1];
    for (std::size_t l = 0; l < factors.size(); ++l) {
      out.holes[i] += extract_hole(ey[l] * r, xk[l], bra[i].extent(1), bra[i].extent(2));
      out.holes[j] += extract_hole(r * ex[l], yk[l], bra[j].extent(1), bra[j].extent(2));
    }
  }
  return out;
}

cplx transfer_matrix_overlap(const TNSRep& bra, const TNSRep& ket, const OperatorString& ops) {
  check_compatible(bra, ket);
  const auto b = mps_sites(bra);
  auto k = mps_sites(ket);
  for (const auto& [v, op] : ops) {
    if (v >= k.size()) throw ArgumentError("operator site out of range");
    k[v] = apply_site_operator(k[v], op);
  }
  return mps_holes(b, k, false).value;
}

cplx transfer_matrix_overlap(const TNSRep& bra, const TNSRep& ket) { return transfer_matrix_overlap(bra, ket, OperatorString{}); }

cplx transfer_matrix_overlap(const TNSRep& bra, const TNSRep& ket, const Hamiltonian& obs) {
  check_compatible(bra, ket);
  return hamiltonian_holes(mps_sites(bra), mps_sites(ket), obs, false).value;
}

cplx tns_overlap(const TNSRep& bra, const TNSRep& ket, const Hamiltonian* obs) {
  const auto kind = bra.shape.kind();
  bool local = true;
  if (obs) {
    for (const auto& t : obs->terms()) local = local && t.support.size() <= 2;
  }
  if ((kind == GraphKind::ring || kind == GraphKind::chain) && local) {
    return obs ? transfer_matrix_overlap(bra, ket, *obs) : transfer_matrix_overlap(bra, ket);
  }
  const Tensor b = tns_evaluate(bra);
  const Tensor k = tns_evaluate(ket);
  return obs ? inner(b, obs->apply(k)) : inner(b, k);
}

cplx mps_strategy_expectation(const BTNSRep& rep, const Hamiltonian* obs) {
  const TNSRep t = embed_mps_strategy(rep, snake_path(rep.shape));
  return tns_overlap(t, t, obs);
}

namespace {

TNSRep contract_weight(const BTNSRep& rep, const std::vector<cplx>& phi) {
  TNSRep out;
  out.shape = rep.shape;
  const Tensor site({phi.size()}, phi);
  for (const auto& m : rep.maps) out.maps.push_back(contract(m, site, {{m.rank() - 1, 0}}));
  return out;
}

}  // namespace

cplx border_rank_expectation(const BTNSRep& rep, const Hamiltonian* obs, const InterpolationPlan& plan) {
  rep.validate();
  const InterpolationPlan needed = make_plan(rep);
  if (plan.k < needed.degree_bound + 1 || plan.nodes.size() != plan.k) {
    throw ArgumentError("interpolation plan has too few nodes for this representation");
  }
  const ProductCurve curve = border_rank_curve({rep.a, rep.dloc, rep.shape.vertex_count()});
  std::vector<cplx> samples;
  samples.reserve(plan.k);
  for (const cplx z : plan.nodes) {
    std::vector<TNSRep> bras;
    std::vector<TNSRep> kets;
    for (const auto& term : curve.terms) {
      bras.push_back(contract_weight(rep, curve.site_vector(term, std::conj(z))));
      kets.push_back(contract_weight(rep, curve.site_vector(term, z)));
    }
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < curve.terms.size(); ++i) {
      for (std::size_t j = 0; j < curve.terms.size(); ++j) {
        acc += std::conj(curve.terms[i].coefficient) * curve.terms[j].coefficient * tns_overlap(bras[i], kets[j], obs);
      }
    }
    samples.push_back(acc);
  }
  return stable_interpolate(samples, plan.scale_degree);
}

double border_rank_energy(const BTNSRep& rep, const Hamiltonian& obs) {
  const InterpolationPlan plan = make_plan(rep);
  const cplx n = border_rank_expectation(rep, nullptr, plan);
  if (!(n.real() > 0.0)) throw DegenerateStateError("border rank norm is not positive");
  return (border_rank_expectation(rep, &obs, plan) / n).real();
}

}  // namespace btns
