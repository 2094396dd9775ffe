#include "btnslab/weight_states.hpp"

#include "btnslab/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace btns {

namespace {

std::size_t checked_pow(std::size_t base, std::size_t exp) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (n > std::numeric_limits<std::size_t>::max() / base) throw ResourceError("state size overflows");
    n *= base;
  }
  return n;
}

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

Tensor build_weight_state(const WeightSpec& spec) {
  if (spec.a < 0 || spec.dloc < 0) throw ArgumentError("weight parameters must be non-negative");
  if (spec.L == 0) throw ArgumentError("weight state needs at least one site");
  const std::size_t q = spec.local_dim();
  const std::size_t n = checked_pow(q, spec.L);
  if (n > (std::size_t{1} << 24)) throw ResourceError("weight state too large for dense storage");
  Tensor t(Shape(spec.L, q));
  std::vector<std::size_t> digits(spec.L, 0);
  long sum = 0;
  for (std::size_t x = 0; x < n; ++x) {
    if (sum == spec.a) t[x] = 1.0;
    for (std::size_t k = spec.L; k-- > 0;) {
      if (++digits[k] < q) {
        ++sum;
        break;
      }
      sum -= static_cast<long>(q - 1);
      digits[k] = 0;
    }
  }
  return t;
}

std::int64_t weight_coefficient(int alpha, int a) {
  using boost::multiprecision::cpp_int;
  if (alpha < 0 || a < 0) throw ArgumentError("weight_coefficient needs non-negative arguments");
  cpp_int total = 0;
  cpp_int binom = 1;
  for (int j = 0; j <= a; ++j) {
    if (j > 0) binom = binom * (a - j + 1) / j;
    cpp_int power = 1;
    for (int i = 0; i < alpha; ++i) power *= j;
    const cpp_int term = binom * power;
    if ((a - j) % 2 == 0) {
      total += term;
    } else {
      total -= term;
    }
  }
  if (total > std::numeric_limits<std::int64_t>::max() || total < std::numeric_limits<std::int64_t>::min()) {
    throw NumericError("weight coefficient exceeds 64 bits");
  }
  return total.convert_to<std::int64_t>();
}

std::vector<cplx> ProductCurve::site_vector(const ProductTerm& term, cplx eps) const {
  std::vector<cplx> v(local_dim);
  const cplx x = term.node * eps;
  cplx p = 1.0;
  for (std::size_t i = 0; i < local_dim; ++i) {
    v[i] = p;
    p *= x;
  }
  return v;
}

Tensor ProductCurve::evaluate(cplx eps) const {
  if (eps == cplx{0.0, 0.0} && scale_degree > 0) throw ArgumentError("curve evaluation at eps = 0");
  Tensor out(Shape(L, local_dim));
  for (const auto& term : terms) {
    const auto v = site_vector(term, eps);
    Tensor prod = Tensor::scalar(term.coefficient);
    const Tensor site({local_dim}, v);
    for (std::size_t i = 0; i < L; ++i) prod = outer(prod, site);
    out += prod;
  }
  out *= std::pow(eps, -scale_degree);
  return out;
}

ProductCurve border_rank_curve(const WeightSpec& spec) {
  if (spec.a < 0 || spec.dloc < 0) throw ArgumentError("weight parameters must be non-negative");
  ProductCurve c;
  c.L = spec.L;
  c.local_dim = spec.local_dim();
  c.scale_degree = spec.a;
  double fact = 1.0;
  for (int i = 2; i <= spec.a; ++i) fact *= i;
  for (int j = 0; j <= spec.a; ++j) {
    const double sign = (spec.a - j) % 2 == 0 ? 1.0 : -1.0;
    c.terms.push_back({cplx{sign * binomial(spec.a, j) / fact, 0.0}, cplx{static_cast<double>(j), 0.0}});
  }
  return c;
}

TNSRep weight_mps(const WeightSpec& spec) {
  if (spec.L < 2) throw ArgumentError("weight MPS needs at least two sites");
  if (spec.a < 0) throw ArgumentError("weight must be non-negative");
  if (spec.dloc != spec.a) throw ArgumentError("weight MPS is built with dloc = a; project afterwards");
  const auto q = static_cast<std::size_t>(spec.a) + 1;
  TNSRep rep;
  rep.shape = chain(spec.L, q, q);
  for (std::size_t v = 0; v < spec.L; ++v) {
    Tensor m(rep.shape.map_shape(v));
    for (std::size_t j = 0; j < q; ++j) {
      if (v == 0) {
        m({j, j}) = 1.0;
      } else if (v + 1 == spec.L) {
        m({j, q - 1 - j}) = 1.0;
      } else {
        for (std::size_t alpha = 0; alpha + j < q; ++alpha) m({j, alpha, alpha + j}) = 1.0;
      }
    }
    rep.maps.push_back(std::move(m));
  }
  return rep;
}

Tensor project_local_degree(const Tensor& t, int dloc) {
  if (dloc < 0) throw ArgumentError("local degree must be non-negative");
  const auto q = static_cast<std::size_t>(dloc) + 1;
  for (auto e : t.shape()) {
    if (q > e) throw ArgumentError("local degree exceeds the site dimension");
  }
  const Shape out_shape(t.rank(), q);
  Tensor out(out_shape);
  std::vector<std::size_t> idx(t.rank(), 0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    out[x] = t.at(idx);
    for (std::size_t k = t.rank(); k-- > 0;) {
      if (++idx[k] < q) break;
      idx[k] = 0;
    }
  }
  return out;
}

ProductCurve central_difference_curve(int a, int k, std::size_t L) {
  if (a < 1) throw ArgumentError("central differences need a >= 1");
  if (k < 0) throw ArgumentError("accuracy level must be non-negative");
  const int count = std::max(2 * ((a + 1) / 2) + 2 * k, a + 1);
  const auto n = static_cast<Eigen::Index>(count);
  Eigen::VectorXcd nodes(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    nodes(m) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
  }
  Eigen::MatrixXcd vander(n, n);
  for (Eigen::Index alpha = 0; alpha < n; ++alpha) {
    for (Eigen::Index m = 0; m < n; ++m) vander(alpha, m) = std::pow(nodes(m), static_cast<int>(alpha));
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(a) = 1.0;
  const Eigen::VectorXcd w = vander.fullPivLu().solve(rhs);
  if ((vander * w - rhs).cwiseAbs().maxCoeff() > 1e-8) throw NumericError("central difference stencil failed");

  ProductCurve c;
  c.L = L;
  c.local_dim = static_cast<std::size_t>(a) + 1;
  c.scale_degree = a;
  for (Eigen::Index m = 0; m < n; ++m) c.terms.push_back({w(m), nodes(m)});
  return c;
}

}  // namespace btns
