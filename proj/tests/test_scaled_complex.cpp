#include <doctest.h>

#include <cmath>
#include <random>

#include "growthlab/scaled_complex.hpp"

using growthlab::ScaledComplex;
using cplx = std::complex<double>;

TEST_CASE("mantissa window invariant") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> mag(-300.0, 300.0);
  std::uniform_real_distribution<double> ang(-3.14, 3.14);
  for (int i = 0; i < 2000; ++i) {
    ScaledComplex a = ScaledComplex::from_log_polar(mag(rng), ang(rng));
    ScaledComplex b = ScaledComplex::from_log_polar(mag(rng), ang(rng));
    for (ScaledComplex v : {a * b, a + b, a - b, a / b}) {
      if (v.is_zero()) continue;
      double m = std::abs(v.mantissa());
      CHECK(m >= 1.0);
      CHECK(m < 2.7182818284590456);
    }
  }
}

TEST_CASE("round trips and log_abs") {
  ScaledComplex v = ScaledComplex::from_complex({3.0, -4.0});
  CHECK(v.log_abs() == doctest::Approx(std::log(5.0)));
  CHECK(v.to_complex().real() == doctest::Approx(3.0));
  CHECK(v.to_complex().imag() == doctest::Approx(-4.0));

  ScaledComplex big = ScaledComplex::from_log_polar(1000.0, 0.5);
  CHECK(big.log_abs() == doctest::Approx(1000.0));
  CHECK(big.arg() == doctest::Approx(0.5));
}

TEST_CASE("zero handling") {
  ScaledComplex z;
  CHECK(z.is_zero());
  CHECK(z.log_abs() == -std::numeric_limits<double>::infinity());
  ScaledComplex one = ScaledComplex::from_complex(1.0);
  CHECK((z + one).log_abs() == doctest::Approx(0.0));
  CHECK((one * z).is_zero());
  CHECK((one - one).is_zero());
}

TEST_CASE("absorption above 40 log units") {
  ScaledComplex big = ScaledComplex::from_log_polar(100.0, 0.0);
  ScaledComplex small = ScaledComplex::from_log_polar(100.0 - 41.0, 0.0);
  ScaledComplex sum = big + small;
  CHECK(sum.log_abs() == big.log_abs());
  CHECK(sum.mantissa() == big.mantissa());

  // Inside the threshold (and above double epsilon) the small operand
  // must contribute to the mantissa.
  ScaledComplex near = ScaledComplex::from_log_polar(100.0 - 34.0, 0.0);
  CHECK((big + near).mantissa() != big.mantissa());
}

TEST_CASE("huge dynamic range stays finite") {
  // exp(exp(100))-sized value: log scale e^100 ~ 2.7e43.
  double ls = std::exp(100.0);
  ScaledComplex v = ScaledComplex::from_log_polar(ls, 1.0);
  ScaledComplex w = v * v;
  CHECK(w.log_abs() == doctest::Approx(2.0 * ls));
  CHECK(std::isfinite(std::abs(w.mantissa())));
}

TEST_CASE("associativity of products to 1e-12 in combined logs") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> mag(-200.0, 200.0);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    ScaledComplex a = ScaledComplex::from_log_polar(mag(rng), ang(rng));
    ScaledComplex b = ScaledComplex::from_log_polar(mag(rng), ang(rng));
    ScaledComplex c = ScaledComplex::from_log_polar(mag(rng), ang(rng));
    double l1 = ((a * b) * c).log_abs();
    double l2 = (a * (b * c)).log_abs();
    CHECK(l1 == doctest::Approx(l2).epsilon(1e-12));
  }
}

TEST_CASE("pow_int") {
  ScaledComplex two = ScaledComplex::from_complex(2.0);
  CHECK(two.pow_int(10).log_abs() == doctest::Approx(10 * std::log(2.0)));
  CHECK(two.pow_int(0).log_abs() == doctest::Approx(0.0));
  CHECK(two.pow_int(-2).log_abs() == doctest::Approx(-2 * std::log(2.0)));
}
