#include <doctest.h>

#include <cmath>
#include <numbers>

#include "growthlab/nevanlinna.hpp"

using namespace growthlab;
using cplx = std::complex<double>;

namespace {

// Independent oracle: brute-force max of log(r^n / n!) over n <= cap.
std::pair<double, long> brute_max_term_exp(double r, long cap = 200) {
  double best = -1e300;
  long arg = -1;
  for (long n = 0; n <= cap; ++n) {
    double lt = n * std::log(r) - std::lgamma(double(n) + 1.0);
    if (lt > best + 1e-12 * std::max(1.0, std::abs(best))) {
      best = lt;
      arg = n;
    } else if (lt >= best - 1e-12 * std::max(1.0, std::abs(best))) {
      arg = n;  // tie -> larger index
    }
  }
  return {best, arg};
}

}  // namespace

TEST_CASE("max term and central index of exp(z)") {
  EntireFunction f = parse_function("exp(z)");

  // r = 2.5: mu = 2.5^2/2 = 3.125 at nu = 2 (oracle agrees).
  auto oracle = brute_max_term_exp(2.5);
  MaxTermResult mt = max_term_and_index(f, 2.5);
  CHECK(mt.log_mu == doctest::Approx(std::log(3.125)));
  CHECK(mt.log_mu == doctest::Approx(oracle.first));
  CHECK(mt.nu == 2);
  CHECK(mt.nu == oracle.second);
  CHECK(mt.unimodal);

  // r = 10: indices 9 and 10 tie; the definition takes the max.
  auto oracle10 = brute_max_term_exp(10.0);
  MaxTermResult mt10 = max_term_and_index(f, 10.0);
  CHECK(mt10.nu == 10);
  CHECK(mt10.nu == oracle10.second);
}

TEST_CASE("max term of a monomial") {
  EntireFunction f = parse_function("z^3");
  for (double r : {0.5, 2.0, 7.0}) {
    MaxTermResult mt = max_term_and_index(f, r);
    CHECK(mt.nu == 3);
    CHECK(mt.log_mu == doctest::Approx(3 * std::log(r)));
  }
}

TEST_CASE("unimodality flag detects a rise-fall-rise term sequence") {
  // Coefficients 1, 0.1, 1.1: at r=1 the log-term sequence dips and then
  // exceeds the earlier maximum, so the scan window is not unimodal.
  EntireFunction f = EntireFunction::polynomial({1.0, 0.1, 1.1});
  MaxTermResult mt = max_term_and_index(f, 1.0);
  CHECK(mt.nu == 2);
  CHECK_FALSE(mt.unimodal);

  // A genuinely unimodal series keeps the flag set.
  CHECK(max_term_and_index(parse_function("exp(z)"), 6.3).unimodal);
}

TEST_CASE("log max modulus") {
  CHECK(log_max_modulus(parse_function("exp(z)"), 7.0).log_M == doctest::Approx(7.0));
  CHECK(log_max_modulus(parse_function("exp(z^2)"), 3.0).log_M == doctest::Approx(9.0));

  // exp(z) + exp(-z): the sampled circle max is ln(e^5 + e^-5).
  CirclePolicy no_shortcut;
  no_shortcut.allow_nonneg_shortcut = false;
  double lm = log_max_modulus(parse_function("exp(z) + exp(0 - z)"), 5.0, no_shortcut).log_M;
  CHECK(lm == doctest::Approx(std::log(std::exp(5.0) + std::exp(-5.0))).epsilon(1e-6));
}

TEST_CASE("proximity function closed forms") {
  // m(r, exp z) = r/pi.
  for (double r : {1.0, 10.0, 100.0}) {
    double m = proximity_m(parse_function("exp(z)"), r);
    CHECK(m == doctest::Approx(r / std::numbers::pi).epsilon(1e-6));
  }
  // Constants: log+ 1 = 0.
  CHECK(proximity_m(parse_function("1"), 3.0) == doctest::Approx(0.0));
  // f(z) = z at r = e^2: log+|f| = log r everywhere on the circle.
  CHECK(proximity_m(parse_function("z"), std::exp(2.0)) == doctest::Approx(2.0));
}

TEST_CASE("counting function from a declared divisor") {
  // f = 1/z: N(e, f) = log e = 1.
  MeromorphicFunction f;
  f.numerator = EntireFunction::constant(1.0);
  f.denominator = EntireFunction::variable();
  f.poles_at_origin = 1;
  f.divisor_radius = 10.0;
  f.validate();
  CHECK(counting_N(f, std::exp(1.0)) == doctest::Approx(1.0));

  // f = 1/(z-1): N(e, f) = log(e/1) = 1.
  MeromorphicFunction g;
  g.numerator = EntireFunction::constant(1.0);
  g.denominator = parse_function("z - 1");
  g.poles.push_back({cplx(1.0, 0.0), 1});
  g.divisor_radius = 10.0;
  g.validate();
  CHECK(counting_N(g, std::exp(1.0)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(counting_N(g, 20.0), std::invalid_argument);
}

TEST_CASE("characteristic T") {
  // T(pi, exp z) = 1 (T = m = r/pi for entire exp).
  GrowthSample s = characteristic_T(parse_function("exp(z)"), std::numbers::pi);
  CHECK(s.T == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.N == 0.0);
  CHECK(s.T == s.m);

  // f(z) = z at r = e^2: T = m = 2.
  GrowthSample sz = characteristic_T(parse_function("z"), std::exp(2.0));
  CHECK(sz.T == doctest::Approx(2.0).epsilon(1e-9));

  // f = 1/z at r = e: m = 0, N = 1.
  MeromorphicFunction f;
  f.numerator = EntireFunction::constant(1.0);
  f.denominator = EntireFunction::variable();
  f.poles_at_origin = 1;
  f.divisor_radius = 10.0;
  GrowthSample sm = characteristic_T(f, std::exp(1.0));
  CHECK(sm.m == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sm.N == doctest::Approx(1.0));
  CHECK(sm.T == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Cauchy bound: log mu <= log M on sampled radii") {
  for (const char* expr : {"exp(z)", "exp(z^2)", "(1 + z)*exp(z)"}) {
    EntireFunction f = parse_function(expr);
    for (double r : {0.5, 2.0, 5.0, 11.0}) {
      MaxTermResult mt = max_term_and_index(f, r);
      double lM = log_max_modulus(f, r).log_M;
      CHECK(mt.log_mu <= lM + 1e-9 * std::max(1.0, std::abs(lM)));
    }
  }
  // Doubly exponential growth: keep the central index small (nu ~ e^r).
  EntireFunction g = parse_function("exp(exp(z))");
  for (double r : {0.5, 1.5, 3.0}) {
    MaxTermResult mt = max_term_and_index(g, r);
    double lM = log_max_modulus(g, r).log_M;
    CHECK(mt.log_mu <= lM + 1e-9 * std::max(1.0, std::abs(lM)));
  }
}

TEST_CASE("characteristic sandwich at R = 2r") {
  // T(r) <= log+ M(r) <= 3 T(2r) + slack for entire functions.
  for (const char* expr : {"exp(z)", "exp(z^2)"}) {
    EntireFunction f = parse_function(expr);
    for (double r : {2.0, 5.0, 9.0}) {
      double T_r = proximity_m(f, r);
      double logM = std::max(0.0, log_max_modulus(f, r).log_M);
      double T_2r = proximity_m(f, 2 * r);
      CHECK(T_r <= logM + 1e-6 * std::max(1.0, logM));
      CHECK(logM <= 3.0 * T_2r + 1e-6 * std::max(1.0, T_2r));
    }
  }
}

TEST_CASE("nu nondecreasing and log M increasing in r") {
  EntireFunction f = parse_function("exp(z^2)");
  long prev_nu = -1;
  double prev_lm = -1e300;
  for (double r = 0.5; r < 6.0; r *= 1.3) {
    MaxTermResult mt = max_term_and_index(f, r);
    double lm = log_max_modulus(f, r).log_M;
    CHECK(mt.nu >= prev_nu);
    CHECK(lm > prev_lm);
    prev_nu = mt.nu;
    prev_lm = lm;
  }
}

TEST_CASE("Wiman-Valiron deviation") {
  EntireFunction e = parse_function("exp(z)");
  // nu(20) = 20, max point z=20, f'/f = 1: deviation 0 for m = 1, 2.
  CHECK(wiman_valiron_deviation(e, 20.0, 1) <= 1e-9);
  CHECK(wiman_valiron_deviation(e, 20.0, 2) <= 1e-9);

  // exp(z^2) at r=4: nu = 32 exactly (tie at 16^16/16!), f'/f = 2z.
  EntireFunction g = parse_function("exp(z^2)");
  MaxTermResult mt = max_term_and_index(g, 4.0);
  CHECK(mt.nu == 32);
  CHECK(wiman_valiron_deviation(g, 4.0, 1) <= 0.1);

  CHECK_THROWS_AS(wiman_valiron_deviation(parse_function("z^3"), 2.0, 1),
                  std::invalid_argument);
}

TEST_CASE("meromorphic proximity via quotient") {
  // m(r, exp(-z)) = r/pi as well (the circle average sees the other half).
  MeromorphicFunction f;
  f.numerator = EntireFunction::constant(1.0);
  f.denominator = parse_function("exp(z)");
  f.divisor_radius = 100.0;
  CHECK(proximity_m(f, 10.0) == doctest::Approx(10.0 / std::numbers::pi).epsilon(1e-6));
}
