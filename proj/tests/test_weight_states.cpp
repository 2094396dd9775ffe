#include "btnslab/errors.hpp"
#include "btnslab/weight_states.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace btns;

TEST_CASE("weight state matches digit enumeration") {
  for (int a = 0; a <= 3; ++a) {
    for (int dl = 0; dl <= a; ++dl) {
      for (std::size_t L = 1; L <= 5; ++L) {
        const Tensor chi = build_weight_state({a, dl, L});
        CHECK(oracle::flat(chi) == oracle::weight_state(a, dl, L));
      }
    }
  }
}

TEST_CASE("weight coefficients are a! times Stirling numbers") {
  for (int a = 0; a <= 8; ++a) {
    for (int alpha = 0; alpha <= 10; ++alpha) {
      CHECK(weight_coefficient(alpha, a) == oracle::factorial(a) * oracle::stirling2(alpha, a));
    }
  }
}

TEST_CASE("weight MPS contracts to the weight state exactly") {
  for (int a = 0; a <= 3; ++a) {
    for (std::size_t L = 2; L <= 6; ++L) {
      const TNSRep mps = weight_mps({a, a, L});
      CHECK(oracle::flat(tns_evaluate(mps)) == oracle::weight_state(a, a, L));
    }
  }
}

TEST_CASE("projecting the local degree keeps small digits") {
  const Tensor chi = build_weight_state({2, 2, 3});
  const Tensor p = project_local_degree(chi, 1);
  CHECK(p.shape() == Shape{2, 2, 2});
  CHECK(oracle::flat(p) == oracle::weight_state(2, 1, 3));
}

TEST_CASE("border rank curve converges at first order") {
  for (int a = 1; a <= 3; ++a) {
    const WeightSpec spec{a, a, 4};
    const ProductCurve c = border_rank_curve(spec);
    CHECK(c.terms.size() == static_cast<std::size_t>(a) + 1);
    const oracle::State chi = oracle::weight_state(a, a, 4);
    double prev = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const double err = oracle::distance(oracle::flat(c.evaluate(eps)), chi);
      if (prev > 0.0) CHECK(std::log10(prev / err) >= 0.9);
      prev = err;
    }
  }
}

TEST_CASE("central difference curve for W is second order") {
  const ProductCurve c = central_difference_curve(1, 0, 5);
  const oracle::State w = oracle::weight_state(1, 1, 5);
  const double e1 = oracle::distance(oracle::flat(c.evaluate(1e-2)), w);
  const double e2 = oracle::distance(oracle::flat(c.evaluate(1e-3)), w);
  CHECK(std::log10(e1 / e2) >= 1.9);
}

TEST_CASE("weight state arguments are checked") {
  CHECK_THROWS(build_weight_state({-1, 0, 3}));
  CHECK_THROWS(weight_mps({1, 1, 1}));
}
