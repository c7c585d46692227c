#include "growthlab/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace growthlab {

namespace {
using cplx = std::complex<double>;

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<cplx> default_check_points() {
  std::vector<cplx> pts;
  for (double r : {0.3, 0.7, 1.1, 1.9, 2.6}) {
    pts.push_back(std::polar(r, 0.35));
    pts.push_back(std::polar(r, 2.1));
  }
  return pts;
}

}  // namespace

std::vector<ScaledComplex> EntirePointwise::derivatives_at(cplx z, int n) const {
  std::vector<ScaledComplex> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = f_.derivative(i).eval(z);
  return out;
}

std::vector<ScaledComplex> QuotientPointwise::derivatives_at(cplx z, int n) const {
  std::vector<ScaledComplex> a = num_->derivatives_at(z, n);
  std::vector<ScaledComplex> b = den_->derivatives_at(z, n);
  if (b[0].is_zero())
    throw std::domain_error("quotient derivatives: denominator vanishes at the evaluation point");
  std::vector<ScaledComplex> g(n + 1);
  for (int m = 0; m <= n; ++m) {
    ScaledComplex acc = a[m];
    for (int i = 0; i < m; ++i)
      acc -= ScaledComplex::from_complex(binom(m, i)) * g[i] * b[m - i];
    g[m] = acc / b[0];
  }
  return g;
}

std::vector<ScaledComplex> QuotientDerivativePointwise::derivatives_at(cplx z, int n) const {
  std::vector<ScaledComplex> g = q_.derivatives_at(z, n + 1);
  return {g.begin() + 1, g.end()};
}

namespace {

double residual_impl(const CoefficientEval& coeff, int order, const PointwiseHolomorphic& f,
                     const std::vector<cplx>& points) {
  if (points.empty()) throw std::invalid_argument("ode residual: no sample points");
  double worst = 0.0;
  for (cplx z : points) {
    std::vector<ScaledComplex> d = f.derivatives_at(z, order);
    ScaledComplex acc = d[order];
    double max_term = d[order].log_abs();
    for (int j = 0; j < order; ++j) {
      ScaledComplex term = coeff(j, z) * d[j];
      max_term = std::max(max_term, term.log_abs());
      acc += term;
    }
    if (!std::isfinite(max_term)) continue;  // identically-zero row
    worst = std::max(worst, std::exp(acc.log_abs() - max_term));
  }
  return worst;
}

}  // namespace

double ode_residual(const LinearODE& ode, const PointwiseHolomorphic& f,
                    const std::vector<cplx>& points) {
  return residual_impl(
      [&](int j, cplx z) { return ode.coefficient_at(j, z); }, ode.order, f, points);
}

double ode_residual(const ReducedODE& ode, const PointwiseHolomorphic& f,
                    const std::vector<cplx>& points) {
  return residual_impl(
      [&](int j, cplx z) { return ode.coefficient_at(j, z); }, ode.order, f, points);
}

namespace {

ReducedODE reduce_impl(const CoefficientEval& coeff, int k,
                       std::shared_ptr<const PointwiseHolomorphic> f1) {
  if (k < 2) throw std::invalid_argument("reduce_order: order must be >= 2");
  ReducedODE red;
  red.order = k - 1;
  for (int j = 0; j <= k - 2; ++j) {
    red.coefficients.push_back([coeff, k, j, f1](cplx z) -> ScaledComplex {
      std::vector<ScaledComplex> d = f1->derivatives_at(z, k - j - 1);
      if (d[0].is_zero())
        throw std::domain_error("reduced coefficient: f1 vanishes at the evaluation point");
      // A_{j+1} with the convention A_k = 1.
      ScaledComplex acc = (j + 1 == k) ? ScaledComplex::from_complex(1.0) : coeff(j + 1, z);
      for (int m = 1; m <= k - j - 1; ++m) {
        ScaledComplex a_high = (j + 1 + m == k) ? ScaledComplex::from_complex(1.0)
                                                : coeff(j + 1 + m, z);
        acc += ScaledComplex::from_complex(binom(j + 1 + m, m)) * a_high * (d[m] / d[0]);
      }
      return acc;
    });
  }
  return red;
}

}  // namespace

ReducedODE reduce_order(const LinearODE& ode, std::shared_ptr<const PointwiseHolomorphic> f1,
                        const ReductionOptions& opts) {
  ode.validate();
  std::vector<cplx> pts = opts.check_points.empty() ? default_check_points() : opts.check_points;
  double res = ode_residual(ode, *f1, pts);
  if (res > opts.solution_residual_tol)
    throw std::invalid_argument("reduce_order: f1 is not a solution (residual " +
                                std::to_string(res) + ")");
  LinearODE ode_copy = ode;  // the closures must own the coefficients
  return reduce_impl(
      [ode_copy](int j, cplx z) { return ode_copy.coefficient_at(j, z); }, ode.order,
      std::move(f1));
}

ReducedODE reduce_order(const ReducedODE& ode, std::shared_ptr<const PointwiseHolomorphic> f1,
                        const ReductionOptions& opts) {
  std::vector<cplx> pts = opts.check_points.empty() ? default_check_points() : opts.check_points;
  double res = ode_residual(ode, *f1, pts);
  if (res > opts.solution_residual_tol)
    throw std::invalid_argument("reduce_order: f1 is not a solution of the reduced equation");
  // Copy the coefficient closures so the step owns its inputs.
  auto coeffs = ode.coefficients;
  return reduce_impl(
      [coeffs](int j, cplx z) { return coeffs.at(j)(z); }, ode.order, std::move(f1));
}

double reduction_residual(const ReducedODE& reduced,
                          std::shared_ptr<const PointwiseHolomorphic> f1,
                          std::shared_ptr<const PointwiseHolomorphic> f_other,
                          const std::vector<cplx>& points, const ReductionOptions& opts) {
  std::vector<cplx> pts = points.empty() ? default_check_points() : points;

  // Exclude points where f1 sits in a deep trough (near a zero the reduced
  // coefficients blow up by design).
  std::vector<double> logs;
  for (cplx z : pts) logs.push_back(f1->derivatives_at(z, 0)[0].log_abs());
  std::vector<double> sorted = logs;
  std::sort(sorted.begin(), sorted.end());
  double median = sorted[sorted.size() / 2];
  std::vector<cplx> kept;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (logs[i] > median - opts.zero_exclusion_log_gap) kept.push_back(pts[i]);
  if (kept.empty()) throw std::domain_error("reduction_residual: every point is near a zero of f1");

  QuotientDerivativePointwise nu(f_other, f1);
  return reduction_residual_of(reduced, nu, kept);
}

double reduction_residual_of(const ReducedODE& reduced, const PointwiseHolomorphic& nu,
                             const std::vector<cplx>& points) {
  return ode_residual(reduced, nu, points);
}

}  // namespace growthlab
