#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "growthlab/expression.hpp"

namespace growthlab {

/// Quotient of entire functions with a declared pole divisor (no root
/// finding: poles must be supplied, valid inside `divisor_radius`).
struct MeromorphicFunction {
  EntireFunction numerator;
  EntireFunction denominator;
  struct Pole {
    std::complex<double> location;
    int multiplicity = 1;
  };
  std::vector<Pole> poles;       // poles with |z| > 0
  int poles_at_origin = 0;       // n(0, f)
  double divisor_radius = 0.0;   // divisor declared complete inside this radius

  /// Checks declared poles really sit on zeros of the denominator.
  void validate() const;

  double log_abs(std::complex<double> z) const {
    return numerator.eval(z).log_abs() - denominator.eval(z).log_abs();
  }
};

struct GrowthSample {
  double r = 0.0;
  std::optional<double> log_M;
  std::optional<double> log_mu;
  std::optional<long> nu;
  double m = 0.0;
  double N = 0.0;
  double T = 0.0;
};

struct MaxTermResult {
  double log_mu;      // log of the maximum term |a_n| r^n
  long nu;            // central index (largest attaining index)
  bool unimodal;      // scanned log-term sequence rose then fell
  std::size_t scanned;
};

/// Exact arg-max of |a_n| r^n over the truncated series; ties resolved to the
/// largest index. Scan stops after 10 consecutive decreasing log-terms past
/// the running max; throws if the budget is exhausted first.
MaxTermResult max_term_and_index(const EntireFunction& f, double r,
                                 std::size_t budget = 200000);

struct CirclePolicy {
  int initial_log2_points = 8;
  int max_log2_points = 20;
  double rel_tol = 1e-3;
  bool allow_nonneg_shortcut = true;
};

struct MaxModulusResult {
  double log_M;
  double arg_max_theta;
  int log2_points;   // 0 when the nonneg-coefficient shortcut was taken
};

/// log M(r, f) by circle sampling with point doubling, or exactly as
/// log f(r) when all series coefficients are nonnegative reals.
MaxModulusResult log_max_modulus(const EntireFunction& f, double r,
                                 const CirclePolicy& policy = {});

struct QuadraturePolicy {
  int initial_log2_panels = 8;
  int max_log2_panels = 20;
  double rel_tol = 1e-8;
  double abs_floor = 1e-12;
};

/// Proximity function m(r, f): circle average of log+ |f|, trapezoid panels
/// doubled to tolerance. Throws on non-convergence within the panel budget.
double proximity_m(const EntireFunction& f, double r, const QuadraturePolicy& policy = {});
double proximity_m(const MeromorphicFunction& f, double r, const QuadraturePolicy& policy = {});

/// Generic circle average of log+ of a log-magnitude field.
double proximity_m_of(const std::function<double(std::complex<double>)>& log_abs_fn,
                      double r, const QuadraturePolicy& policy = {});

/// Integrated pole-counting function N(r, f), evaluated exactly from the
/// declared divisor. Throws when r exceeds the divisor validity radius.
double counting_N(const MeromorphicFunction& f, double r);

/// Nevanlinna characteristic sample: T = m + N, plus M/mu/nu when a series
/// view exists.
GrowthSample characteristic_T(const EntireFunction& f, double r,
                              const QuadraturePolicy& policy = {});
GrowthSample characteristic_T(const MeromorphicFunction& f, double r,
                              const QuadraturePolicy& policy = {});

/// | f^(m)(z_r) (z_r / nu)^m / f(z_r) - 1 | at the sampled maximum-modulus
/// point z_r. Throws std::invalid_argument for polynomial f.
double wiman_valiron_deviation(const EntireFunction& f, double r, int m,
                               const CirclePolicy& policy = {});

}  // namespace growthlab
