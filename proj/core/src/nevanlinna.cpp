#include "growthlab/nevanlinna.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace growthlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void MeromorphicFunction::validate() const {
  for (const auto& p : poles) {
    double la = denominator.eval(p.location).log_abs();
    // Scale reference: denominator magnitude slightly off the pole.
    std::complex<double> nearby = p.location + std::complex<double>(1e-3, 1e-3) *
                                                   std::max(1.0, std::abs(p.location));
    double ref = denominator.eval(nearby).log_abs();
    if (la > ref + std::log(1e-8))
      throw std::invalid_argument("meromorphic divisor: declared pole is not a zero of the denominator");
  }
}

MaxTermResult max_term_and_index(const EntireFunction& f, double r, std::size_t budget) {
  if (!(r > 0.0)) throw std::invalid_argument("max_term_and_index: r must be positive");
  const double log_r = std::log(r);

  MaxTermResult res;
  res.log_mu = -std::numeric_limits<double>::infinity();
  res.nu = -1;
  res.unimodal = true;
  res.scanned = 0;

  std::size_t chunk = 64;
  std::vector<ScaledComplex> coeffs;
  int decreasing_run = 0;
  double prev_finite = -std::numeric_limits<double>::infinity();
  bool finite_below_seen = false;  // some finite term already fell below the max
  const double tie_slack = 1e-12;

  for (std::size_t n = 0;; ++n) {
    if (n >= budget)
      throw std::runtime_error("max_term_and_index: truncation budget exhausted before the term sequence turned decreasing");
    if (n >= coeffs.size()) {
      chunk = std::max(chunk * 2, n + 1);
      coeffs = f.series_coefficients(std::min(chunk, budget));
    }
    double lt = coeffs[n].log_abs() + double(n) * log_r;
    res.scanned = n + 1;
    double rel = std::isfinite(res.log_mu) ? std::max(1.0, std::abs(res.log_mu)) : 1.0;

    bool is_new_max = std::isfinite(lt) && lt > res.log_mu + tie_slack * rel;
    bool is_tie = std::isfinite(lt) && !is_new_max && lt >= res.log_mu - tie_slack * rel;
    if (is_new_max) {
      if (finite_below_seen) res.unimodal = false;
      res.log_mu = lt;
      res.nu = static_cast<long>(n);
      decreasing_run = 0;
    } else if (is_tie) {
      res.nu = static_cast<long>(n);  // tie: take the largest index
      decreasing_run = 0;
    } else if (res.nu >= 0) {
      // Below the running max. Zero coefficients count toward the decreasing
      // run; a finite term only does when it does not exceed the previous
      // finite term.
      if (!std::isfinite(lt) || lt <= prev_finite + tie_slack * rel) {
        ++decreasing_run;
      } else {
        decreasing_run = 0;
      }
      if (std::isfinite(lt)) finite_below_seen = true;
    }
    if (std::isfinite(lt)) prev_finite = lt;
    if (decreasing_run >= 10 && lt < res.log_mu - 5.0) break;
  }
  if (res.nu < 0) throw std::runtime_error("max_term_and_index: series is identically zero");
  return res;
}

MaxModulusResult log_max_modulus(const EntireFunction& f, double r, const CirclePolicy& policy) {
  if (!(r > 0.0)) throw std::invalid_argument("log_max_modulus: r must be positive");

  if (policy.allow_nonneg_shortcut && f.nonnegative_series()) {
    MaxModulusResult res;
    res.log_M = f.eval(r).log_abs();
    res.arg_max_theta = 0.0;
    res.log2_points = 0;
    return res;
  }

  double best = -std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  double prev = -std::numeric_limits<double>::infinity();
  int m = policy.initial_log2_points;
  for (;; ++m) {
    std::size_t npts = std::size_t(1) << m;
    // Only the points new at this level (odd multiples of the half-step),
    // except the first pass which covers everything.
    std::size_t step = (m == policy.initial_log2_points) ? 1 : 2;
    std::size_t start = (m == policy.initial_log2_points) ? 0 : 1;
    for (std::size_t j = start; j < npts; j += step) {
      double theta = kTwoPi * double(j) / double(npts);
      double la = f.eval(std::polar(r, theta)).log_abs();
      if (la > best) {
        best = la;
        best_theta = theta;
      }
    }
    if (std::isfinite(prev) &&
        std::abs(best - prev) <= policy.rel_tol * std::max(1.0, std::abs(best)))
      break;
    prev = best;
    if (m >= policy.max_log2_points) break;
  }
  MaxModulusResult res;
  res.log_M = best;
  res.arg_max_theta = best_theta;
  res.log2_points = m;
  return res;
}

double proximity_m_of(const std::function<double(std::complex<double>)>& log_abs_fn,
                      double r, const QuadraturePolicy& policy) {
  // Trapezoid on a periodic integrand reduces to the uniform average;
  // doubling reuses previous points via the midpoint refinement.
  std::size_t n = std::size_t(1) << policy.initial_log2_panels;
  auto sample_avg = [&](std::size_t count, std::size_t stride, std::size_t offset) {
    double acc = 0.0;
    for (std::size_t j = offset; j < count; j += stride) {
      double theta = kTwoPi * double(j) / double(count);
      double la = log_abs_fn(std::polar(r, theta));
      acc += std::max(0.0, la);
    }
    return acc;
  };

  double total = sample_avg(n, 1, 0);
  double prev = total / double(n);
  for (int m = policy.initial_log2_panels + 1; m <= policy.max_log2_panels; ++m) {
    n <<= 1;
    total += sample_avg(n, 2, 1);
    double cur = total / double(n);
    double tol = std::max(policy.rel_tol * std::abs(cur), policy.abs_floor);
    if (std::abs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  throw std::runtime_error("proximity_m: quadrature did not converge within the panel budget");
}

double proximity_m(const EntireFunction& f, double r, const QuadraturePolicy& policy) {
  return proximity_m_of([&](std::complex<double> z) { return f.eval(z).log_abs(); }, r, policy);
}

double proximity_m(const MeromorphicFunction& f, double r, const QuadraturePolicy& policy) {
  // Nudge the radius off any declared pole circle.
  for (const auto& p : f.poles)
    if (std::abs(std::abs(p.location) - r) <= 1e-9 * std::max(1.0, r)) {
      r *= 1.0 + 1e-9;
      break;
    }
  return proximity_m_of([&](std::complex<double> z) { return f.log_abs(z); }, r, policy);
}

double counting_N(const MeromorphicFunction& f, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("counting_N: r must be positive");
  if (r > f.divisor_radius)
    throw std::invalid_argument("counting_N: r beyond declared divisor validity");
  double acc = f.poles_at_origin * std::log(r);
  for (const auto& p : f.poles) {
    double a = std::abs(p.location);
    if (a > 0.0 && a <= r) acc += p.multiplicity * std::log(r / a);
  }
  return acc;
}

GrowthSample characteristic_T(const EntireFunction& f, double r, const QuadraturePolicy& policy) {
  GrowthSample s;
  s.r = r;
  s.m = proximity_m(f, r, policy);
  s.N = 0.0;
  s.T = s.m;
  s.log_M = log_max_modulus(f, r).log_M;
  try {
    auto mt = max_term_and_index(f, r);
    s.log_mu = mt.log_mu;
    s.nu = mt.nu;
  } catch (const std::runtime_error&) {
    // Scan budget exhausted (central index out of reach): mark absent.
  }
  return s;
}

GrowthSample characteristic_T(const MeromorphicFunction& f, double r,
                              const QuadraturePolicy& policy) {
  GrowthSample s;
  s.r = r;
  s.m = proximity_m(f, r, policy);
  s.N = counting_N(f, r);
  s.T = s.m + s.N;
  return s;
}

double wiman_valiron_deviation(const EntireFunction& f, double r, int m,
                               const CirclePolicy& policy) {
  if (!f.is_transcendental())
    throw std::invalid_argument("wiman_valiron_deviation: lemma inapplicable to polynomials");
  if (m < 0) throw std::invalid_argument("wiman_valiron_deviation: m must be >= 0");

  CirclePolicy sampling = policy;
  sampling.allow_nonneg_shortcut = false;  // need the arg-max angle
  MaxModulusResult mm = log_max_modulus(f, r, sampling);
  std::complex<double> z_r = std::polar(r, mm.arg_max_theta);

  auto mt = max_term_and_index(f, r);
  if (mt.nu <= 0) throw std::runtime_error("wiman_valiron_deviation: central index is zero");

  ScaledComplex ratio = f.derivative(m).eval(z_r) / f.eval(z_r);
  std::complex<double> factor = std::pow(z_r / double(mt.nu), m);
  ScaledComplex dev = ratio * ScaledComplex::from_complex(factor) -
                      ScaledComplex::from_complex(1.0);
  return std::exp(dev.log_abs());
}

}  // namespace growthlab
