#include <doctest.h>

#include <cmath>
#include <random>

#include "growthlab/polyroots.hpp"

using namespace growthlab;
using cplx = std::complex<double>;

TEST_CASE("zero bound values") {
  // z^2 - 3z + 2: bound 1 + 3 = 4; roots {1, 2}.
  CHECK(polynomial_zero_bound({2.0, -3.0, 1.0}) == doctest::Approx(4.0));
  // z^8 - 1: bound 2; roots on the unit circle.
  std::vector<cplx> cyclo(9, 0.0);
  cyclo[0] = -1.0;
  cyclo[8] = 1.0;
  CHECK(polynomial_zero_bound(cyclo) == doctest::Approx(2.0));
  // 5z^3 + 10z: bound 1 + 10/5 = 3.
  CHECK(polynomial_zero_bound({0.0, 10.0, 0.0, 5.0}) == doctest::Approx(3.0));

  CHECK_THROWS_AS(polynomial_zero_bound({1.0}), std::invalid_argument);
}

TEST_CASE("root oracle recovers known factorizations") {
  RootFindResult r = find_roots({2.0, -3.0, 1.0});  // (z-1)(z-2)
  REQUIRE(r.roots.size() == 2);
  std::vector<double> mods = {std::abs(r.roots[0]), std::abs(r.roots[1])};
  std::sort(mods.begin(), mods.end());
  CHECK(mods[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mods[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.max_residual < 1e-10);

  // 5z^3 + 10z = 5z(z^2 + 2): roots {0, +-i sqrt 2}.
  RootFindResult q = find_roots({0.0, 10.0, 0.0, 5.0});
  double maxmod = 0.0;
  for (auto& z : q.roots) maxmod = std::max(maxmod, std::abs(z));
  CHECK(maxmod == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("roots of unity stay within the bound") {
  std::vector<cplx> c(13, 0.0);
  c[0] = -1.0;
  c[12] = 1.0;
  CHECK(verify_roots_within(c));
  RootFindResult r = find_roots(c);
  for (auto& z : r.roots) CHECK(std::abs(z) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("200 seeded random polynomials: all roots within the bound") {
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> coeff(-10.0, 10.0);
  std::uniform_int_distribution<int> deg(1, 8);
  for (int t = 0; t < 200; ++t) {
    int n = deg(rng);
    std::vector<cplx> c(n + 1);
    for (auto& x : c) x = coeff(rng);
    while (std::abs(c.back()) < 1e-3) c.back() = coeff(rng);
    CAPTURE(t);
    CHECK(verify_roots_within(c));
  }
}

TEST_CASE("degree cap") {
  std::vector<cplx> big(40, 1.0);
  CHECK_THROWS_AS(find_roots(big), std::invalid_argument);
}
