#include <doctest.h>

#include <cmath>
#include <numbers>

#include "growthlab/ode.hpp"

using namespace growthlab;
using cplx = std::complex<double>;

namespace {

std::vector<double> linear_radii(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = lo + (hi - lo) * i / (n - 1);
  return r;
}

std::vector<ScaledComplex> unit_ic(int k, int which) {
  std::vector<ScaledComplex> ics(k, ScaledComplex::zero());
  ics[which] = ScaledComplex::from_complex(1.0);
  return ics;
}

}  // namespace

TEST_CASE("f' = f reproduces the exponential") {
  // f' - f = 0 written as f' + A_0 f = 0 with A_0 = -1.
  LinearODE ode{1, {parse_function("0 - 1")}};
  IntegrationOptions opts;
  opts.tol = 1e-10;
  RayTrace tr = integrate_ray(ode, unit_ic(1, 0), 0.0, linear_radii(1.0, 5.0, 9), opts);
  REQUIRE(tr.termination == TraceTermination::completed);
  for (const auto& s : tr.samples) CHECK(s.log_abs[0] == doctest::Approx(s.r).epsilon(1e-9));
}

TEST_CASE("harmonic oscillator hits |sin(pi/2)| = 1") {
  LinearODE ode{2, {parse_function("1"), parse_function("0")}};  // f'' + f = 0
  IntegrationOptions opts;
  opts.tol = 1e-11;
  std::vector<double> radii = {std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi};
  RayTrace tr = integrate_ray(ode, unit_ic(2, 1), 0.0, radii, opts);  // f = sin
  REQUIRE(tr.termination == TraceTermination::completed);
  CHECK(tr.samples[1].log_abs[0] == doctest::Approx(0.0).epsilon(1e-9));  // |sin(pi/2)| = 1
  CHECK(std::exp(tr.samples[0].log_abs[0]) ==
        doctest::Approx(std::sin(std::numbers::pi / 4)).epsilon(1e-9));
}

TEST_CASE("f' = exp(z) f integrates to log|f(5)| = e^5 - 1") {
  LinearODE ode{1, {parse_function("0 - exp(z)")}};  // f' - e^z f = 0
  IntegrationOptions opts;
  opts.tol = 1e-9;
  RayTrace tr = integrate_ray(ode, unit_ic(1, 0), 0.0, linear_radii(1.0, 5.0, 5), opts);
  REQUIRE(tr.termination == TraceTermination::completed);
  double expected = std::exp(5.0) - 1.0;
  CHECK(tr.samples.back().log_abs[0] == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("canonical basis spans the expected combinations") {
  // f'' - 3f' + 2f = 0: A_0 = 2, A_1 = -3; basis {e^z, e^{2z}}.
  LinearODE ode{2, {parse_function("2"), parse_function("0 - 3")}};
  FanSpec fan{8, {}};
  IntegrationOptions opts;
  opts.tol = 1e-11;
  std::vector<double> radii = linear_radii(0.5, 3.0, 6);
  auto basis = solution_basis(ode, fan, radii, opts);
  REQUIRE(basis.size() == 2);

  // handle0 = 2 e^z - e^{2z}; handle1 = e^{2z} - e^z (from unit initial data).
  const RayTrace* t0 = basis[0].trace_at(0.0);
  const RayTrace* t1 = basis[1].trace_at(0.0);
  REQUIRE(t0 != nullptr);
  REQUIRE(t1 != nullptr);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double r = radii[i];
    double expect0 = std::abs(2 * std::exp(r) - std::exp(2 * r));
    double expect1 = std::abs(std::exp(2 * r) - std::exp(r));
    CHECK(t0->samples[i].log_abs[0] == doctest::Approx(std::log(expect0)).epsilon(1e-8));
    CHECK(t1->samples[i].log_abs[0] == doctest::Approx(std::log(expect1)).epsilon(1e-8));
  }
}

TEST_CASE("solution_log_M: cos handle peaks on the imaginary axis") {
  LinearODE ode{2, {parse_function("1"), parse_function("0")}};
  FanSpec fan{64, {}};
  IntegrationOptions opts;
  opts.tol = 1e-10;
  std::vector<double> radii = {1.0, 2.0, 3.0};
  auto basis = solution_basis(ode, fan, radii, opts);
  auto lm = basis[0].solution_log_M(3.0);  // cos z
  REQUIRE(lm.has_value());
  // Oracle: max of |cos| on |z|=3 is cosh(3); ln cosh 3 = 2.3093285...
  CHECK(lm->log_M == doctest::Approx(std::log(std::cosh(3.0))).epsilon(1e-8));
  CHECK(lm->log_M == doctest::Approx(2.3093285046).epsilon(1e-8));
  CHECK(lm->contributing_rays == 64);
}

TEST_CASE("solution_log_M: exp(-z^2) grows along the imaginary axis") {
  LinearODE ode{1, {parse_function("2*z")}};  // f' + 2z f = 0 -> exp(-z^2)
  FanSpec fan{64, {}};
  IntegrationOptions opts;
  opts.tol = 1e-10;
  std::vector<double> radii = {1.0, 2.0};
  auto basis = solution_basis(ode, fan, radii, opts);
  auto lm = basis[0].solution_log_M(2.0);
  REQUIRE(lm.has_value());
  CHECK(lm->log_M == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("Wronskian of explicit entire functions") {
  std::vector<EntireFunction> basis = {parse_function("exp(z)"), parse_function("exp(2*z)")};
  ScaledComplex w0 = wronskian_at(basis, cplx(0.0));
  CHECK(w0.log_abs() == doctest::Approx(0.0).epsilon(1e-12));  // det [[1,1],[1,2]] = 1
  // W(z) = e^{3z}.
  ScaledComplex w1 = wronskian_at(basis, cplx(1.5, 0.0));
  CHECK(w1.log_abs() == doctest::Approx(4.5).epsilon(1e-9));
}

TEST_CASE("canonical-basis Wronskian at the base point is exactly 1") {
  LinearODE ode{2, {parse_function("2"), parse_function("0 - 3")}};
  FanSpec fan{4, {}};
  auto basis = solution_basis(ode, fan, linear_radii(0.5, 2.0, 4), {});
  ScaledComplex w = wronskian_at(basis, cplx(0.0));
  CHECK(w.log_abs() == 0.0);
  CHECK(w.mantissa() == cplx(1.0));
}

TEST_CASE("coefficient reconstruction from the Wronskian identity") {
  LinearODE ode{2, {parse_function("2"), parse_function("0 - 3")}};
  FanSpec fan{8, {}};
  IntegrationOptions opts;
  opts.tol = 1e-11;
  std::vector<double> radii = linear_radii(0.25, 3.0, 12);
  auto basis = solution_basis(ode, fan, radii, opts);
  int checked = 0;
  for (double theta : fan.angles()) {
    for (double r : radii) {
      cplx z = std::polar(r, theta);
      ScaledComplex a1 = reconstruct_coefficient(basis, 1, z);   // A_{k-1} = A_1 = -3
      ScaledComplex a0 = reconstruct_coefficient(basis, 2, z);   // A_0 = 2
      cplx va1 = a1.to_complex(), va0 = a0.to_complex();
      CHECK(std::abs(va1 - cplx(-3.0)) <= 1e-6 * 3.0);
      CHECK(std::abs(va0 - cplx(2.0)) <= 1e-6 * 2.0);
      ++checked;
    }
  }
  CHECK(checked >= 96);
}

TEST_CASE("reconstruction for the harmonic oscillator") {
  LinearODE ode{2, {parse_function("1"), parse_function("0")}};
  FanSpec fan{4, {}};
  IntegrationOptions opts;
  opts.tol = 1e-11;
  // Stay away from zeros of cos/sin on the axes: use radii where both are
  // comfortably nonzero is unnecessary -- the Wronskian of the pair is 1
  // everywhere, only individual values vary.
  std::vector<double> radii = {0.4, 0.9, 1.3};
  auto basis = solution_basis(ode, fan, radii, opts);
  cplx z = std::polar(0.9, std::numbers::pi / 2);
  CHECK(std::abs(reconstruct_coefficient(basis, 2, z).to_complex() - cplx(1.0)) <= 1e-6);
  CHECK(std::abs(reconstruct_coefficient(basis, 1, z).to_complex() - cplx(0.0)) <= 1e-6);
}

TEST_CASE("Abel consistency along rays") {
  LinearODE ode{2, {parse_function("2"), parse_function("0 - 3")}};
  FanSpec fan{8, {}};
  IntegrationOptions opts;
  opts.tol = 1e-11;
  auto basis = solution_basis(ode, fan, linear_radii(0.5, 4.0, 8), opts);
  for (double theta : {0.0, std::numbers::pi / 4, std::numbers::pi}) {
    CHECK(abel_consistency(basis, theta) <= 1e-6);
  }
}

TEST_CASE("tolerance refinement controls the terminal error") {
  LinearODE ode{1, {parse_function("0 - exp(z)")}};
  std::vector<double> radii = {5.0};
  IntegrationOptions coarse;
  coarse.tol = 1e-6;
  IntegrationOptions fine;
  fine.tol = 1e-9;
  double lc = integrate_ray(ode, unit_ic(1, 0), 0.0, radii, coarse).samples[0].log_abs[0];
  double lf = integrate_ray(ode, unit_ic(1, 0), 0.0, radii, fine).samples[0].log_abs[0];
  // Halving tol by 1e3 must change the terminal value by less than
  // coarse tol x trace length (in the log scale the error is relative).
  CHECK(std::abs(lc - lf) <= coarse.tol * 5.0 * std::exp(5.0));
}

TEST_CASE("step budget yields a valid partial trace") {
  LinearODE ode{2, {parse_function("exp(z)"), parse_function("0")}};
  IntegrationOptions opts;
  opts.tol = 1e-6;
  opts.step_budget = 2000;
  RayTrace tr = integrate_ray(ode, unit_ic(2, 0), 0.3, linear_radii(1.0, 40.0, 40), opts);
  CHECK(tr.termination == TraceTermination::step_budget);
  CHECK(tr.samples.size() < 40);
  CHECK(tr.accepted_steps == 2000);
  for (std::size_t i = 1; i < tr.samples.size(); ++i)
    CHECK(tr.samples[i].r > tr.samples[i - 1].r);
}

TEST_CASE("budget censoring in handle growth data") {
  LinearODE ode{2, {parse_function("exp(z)"), parse_function("0")}};
  FanSpec fan{8, {}};
  IntegrationOptions opts;
  opts.tol = 1e-6;
  opts.step_budget = 5000;
  std::vector<double> radii = linear_radii(2.0, 30.0, 15);
  auto basis = solution_basis(ode, fan, radii, opts);
  GrowthData d = handle_growth_data(basis[0]);
  double censor = basis[0].censor_radius();
  CHECK(std::isfinite(censor));
  CHECK(d.censored_count > 0);
  for (std::size_t i = 0; i < d.radii.size(); ++i)
    if (d.radii[i] > censor) CHECK_FALSE(d.log_M[i].has_value());
}

TEST_CASE("renormalization keeps mantissas bounded on growing rays") {
  LinearODE ode{1, {parse_function("0 - exp(z)")}};
  IntegrationOptions opts;
  opts.tol = 1e-8;
  RayTrace tr = integrate_ray(ode, unit_ic(1, 0), 0.0, {6.0}, opts);
  CHECK(tr.renorm_count > 3);  // log f = e^6 - 1 ~ 402: at least ~13 renorms of 30
  CHECK(std::isfinite(tr.samples[0].log_abs[0]));
  CHECK(tr.samples[0].log_abs[0] == doctest::Approx(std::exp(6.0) - 1.0).epsilon(1e-6));
}

TEST_CASE("fan angles and sector exclusion") {
  FanSpec fan{64, {{0.0, std::numbers::pi / 6}}};
  auto angles = fan.angles();
  for (double a : angles) CHECK(std::abs(a) >= std::numbers::pi / 6 - 1e-12);
  CHECK(angles.size() < 64);
  CHECK(angles.size() >= 52);  // 64 - 11 excluded around 0
  FanSpec all_excluded{4, {{0.0, 4.0}}};
  CHECK_THROWS_AS(all_excluded.angles(), std::invalid_argument);
}

TEST_CASE("integrator input validation") {
  LinearODE ode{1, {parse_function("1")}};
  IntegrationOptions bad_tol;
  bad_tol.tol = 1e-3;
  CHECK_THROWS_AS(integrate_ray(ode, unit_ic(1, 0), 0.0, {1.0}, bad_tol),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_ray(ode, unit_ic(1, 0), 0.0, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(integrate_ray(ode, {}, 0.0, {1.0}, {}), std::invalid_argument);
  LinearODE mismatched{2, {parse_function("1")}};
  CHECK_THROWS_AS(integrate_ray(mismatched, unit_ic(2, 0), 0.0, {1.0}, {}),
                  std::invalid_argument);
}
