#include <doctest.h>

#include <cmath>
#include <memory>

#include "growthlab/reduction.hpp"

using namespace growthlab;
using cplx = std::complex<double>;

namespace {

std::shared_ptr<const PointwiseHolomorphic> entire(const char* expr) {
  return std::make_shared<EntirePointwise>(parse_function(expr));
}

LinearODE two_exp_ode() {
  // f'' - 3f' + 2f = 0: A_0 = 2, A_1 = -3.
  return LinearODE{2, {parse_function("2"), parse_function("0 - 3")}};
}

}  // namespace

TEST_CASE("quotient derivatives match closed forms") {
  // g = exp(2z)/exp(z) = exp(z): all derivatives e^z.
  QuotientPointwise q(entire("exp(2*z)"), entire("exp(z)"));
  auto d = q.derivatives_at(cplx(0.7, 0.3), 4);
  for (int i = 0; i <= 4; ++i) {
    cplx expected = std::exp(cplx(0.7, 0.3));
    CHECK(std::abs(d[i].to_complex() - expected) <= 1e-10 * std::abs(expected));
  }
}

TEST_CASE("reduction of f''-3f'+2f=0 by f1=exp(z): A_{1,0} = -1") {
  ReducedODE red = reduce_order(two_exp_ode(), entire("exp(z)"));
  REQUIRE(red.order == 1);
  for (double r : {0.3, 1.0, 2.5}) {
    for (double th : {0.0, 1.1, 2.7}) {
      cplx z = std::polar(r, th);
      CHECK(std::abs(red.coefficient_at(0, z).to_complex() - cplx(-1.0)) <= 1e-9);
    }
  }
}

TEST_CASE("reduction by f1=exp(2z): A_{1,0} = +1") {
  ReducedODE red = reduce_order(two_exp_ode(), entire("exp(2*z)"));
  for (double r : {0.3, 1.0, 2.5}) {
    cplx z = std::polar(r, 0.8);
    CHECK(std::abs(red.coefficient_at(0, z).to_complex() - cplx(1.0)) <= 1e-9);
  }
}

TEST_CASE("nu_1 = (f2/f1)' solves the reduced equation") {
  ReducedODE red = reduce_order(two_exp_ode(), entire("exp(z)"));
  // nu_1 = (e^{2z}/e^z)' = e^z: residual at the 1e-9 level.
  double res = reduction_residual(red, entire("exp(z)"), entire("exp(2*z)"), {});
  CHECK(res <= 1e-9);
}

TEST_CASE("negative control: nu = z is not a solution") {
  ReducedODE red = reduce_order(two_exp_ode(), entire("exp(z)"));
  EntirePointwise wrong(parse_function("z"));
  double res = reduction_residual_of(red, wrong, {{0.5, 0.0}, {2.0, 0.0}, {0.0, 1.5}});
  CHECK(res >= 0.1);
}

TEST_CASE("non-solution f1 is rejected with residual evidence") {
  CHECK_THROWS_AS(reduce_order(two_exp_ode(), entire("exp(3*z)")), std::invalid_argument);
}

TEST_CASE("f''' = 0 reduced by f1 = 1 has zero coefficients") {
  LinearODE ode{3, {parse_function("0"), parse_function("0"), parse_function("0")}};
  ReducedODE red = reduce_order(ode, entire("1"));
  REQUIRE(red.order == 2);
  for (int j = 0; j < 2; ++j)
    CHECK(red.coefficient_at(j, cplx(1.3, 0.4)).is_zero());
}

TEST_CASE("composable reduction: two steps of f''' = 0") {
  LinearODE ode{3, {parse_function("0"), parse_function("0"), parse_function("0")}};
  ReducedODE step1 = reduce_order(ode, entire("1"));
  // nu = (z/1)' = 1 solves step1; reduce again by it.
  ReducedODE step2 = reduce_order(step1, entire("1"));
  REQUIRE(step2.order == 1);
  CHECK(step2.coefficient_at(0, cplx(0.9, 0.1)).is_zero());
}

TEST_CASE("two-step reduction of a third-order equation with basis {e^z,e^2z,e^3z}") {
  // f''' - 6f'' + 11f' - 6f = 0. Reducing by f1 = e^z (f1^(m)/f1 = 1):
  //   A_{1,0} = A_1 + C(2,1)A_2 + C(3,2)A_3 = 11 - 12 + 3 = 2
  //   A_{1,1} = A_2 + C(3,1)A_3       = -6 + 3      = -3
  // i.e. nu'' - 3nu' + 2nu = 0, solved by nu_1 = (e^{2z}/e^z)' = e^z and
  // nu_2 = (e^{3z}/e^z)' = 2e^{2z}. Reducing again by nu_1 = e^z:
  //   A_{2,0} = A_{1,1} + C(2,1) = -3 + 2 = -1, i.e. w' - w = 0.
  LinearODE ode{3, {parse_function("0 - 6"), parse_function("11"), parse_function("0 - 6")}};
  ReducedODE step1 = reduce_order(ode, entire("exp(z)"));
  REQUIRE(step1.order == 2);
  for (double r : {0.4, 1.2, 2.3}) {
    cplx z = std::polar(r, 0.9);
    CHECK(std::abs(step1.coefficient_at(0, z).to_complex() - cplx(2.0)) <= 1e-9);
    CHECK(std::abs(step1.coefficient_at(1, z).to_complex() - cplx(-3.0)) <= 1e-9);
  }

  // Both quotient-derivative substitutions solve the reduced equation.
  CHECK(reduction_residual(step1, entire("exp(z)"), entire("exp(2*z)"), {}) <= 1e-9);
  CHECK(reduction_residual(step1, entire("exp(z)"), entire("exp(3*z)"), {}) <= 1e-9);

  ReducedODE step2 = reduce_order(step1, entire("exp(z)"));
  REQUIRE(step2.order == 1);
  for (double r : {0.4, 1.2, 2.3}) {
    cplx z = std::polar(r, 0.3);
    CHECK(std::abs(step2.coefficient_at(0, z).to_complex() - cplx(-1.0)) <= 1e-9);
  }
  // w = (nu_2 / nu_1)' = (2e^{2z}/e^z)' = 2e^z solves the final equation.
  CHECK(reduction_residual(step2, entire("exp(z)"),
                           std::make_shared<EntirePointwise>(
                               parse_function("exp(2*z)").scaled(2.0)),
                           {}) <= 1e-9);
}

TEST_CASE("harmonic oscillator reduced by cos away from its zeros") {
  LinearODE ode{2, {parse_function("1"), parse_function("0")}};
  // cos z is entire; restrict checks to points where it is far from zero.
  ReductionOptions opts;
  opts.check_points = {{0.2, 0.0}, {0.5, 0.3}, {0.3, 0.8}, {0.1, 1.2}};
  auto cosz = std::make_shared<EntirePointwise>(EntireFunction::from_series(
      [](std::size_t n) {
        if (n % 2) return ScaledComplex::zero();
        double sign = (n / 2) % 2 ? -1.0 : 1.0;
        return ScaledComplex::from_complex(sign) *
               ScaledComplex::from_log_polar(-std::lgamma(double(n) + 1.0), 0.0);
      },
      false, "cos"));
  ReducedODE red = reduce_order(ode, cosz, opts);
  // nu = (sin/cos)' = sec^2 solves the reduced first-order equation.
  auto sinz = std::make_shared<EntirePointwise>(EntireFunction::from_series(
      [](std::size_t n) {
        if (n % 2 == 0) return ScaledComplex::zero();
        double sign = ((n - 1) / 2) % 2 ? -1.0 : 1.0;
        return ScaledComplex::from_complex(sign) *
               ScaledComplex::from_log_polar(-std::lgamma(double(n) + 1.0), 0.0);
      },
      false, "sin"));
  double res = reduction_residual(red, cosz, sinz, opts.check_points, opts);
  CHECK(res <= 1e-6);
}
