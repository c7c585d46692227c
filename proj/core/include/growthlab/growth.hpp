#pragma once

#include <optional>
#include <string>
#include <vector>

#include "growthlab/nevanlinna.hpp"
#include "growthlab/scales.hpp"

namespace growthlab {

/// Finite stand-in for r -> +inf: geometric radii with a tail window over
/// which lim sups are approximated.
struct RadialGrid {
  double r0 = 4.0;
  double ratio = 1.15;
  int count = 40;
  double window_fraction = 0.5;

  std::vector<double> radii() const;
  double r_max() const;
};

enum class GrowthMode { T_based, M_based };

enum class IndicatorKind { order, order_log_shifted, type, type_M, type_log_shifted };

std::string to_string(GrowthMode m);
std::string to_string(IndicatorKind k);

/// Per-radius growth observations; log_M or T may be absent (unavailable or
/// censored).
struct GrowthData {
  std::vector<double> radii;
  std::vector<std::optional<double>> log_M;
  std::vector<std::optional<double>> T;
  int censored_count = 0;   // radii dropped before estimation (e.g. budget cut)
};

struct IndicatorSample {
  double r;
  double numerator;
  double denominator;
  double ratio;
};

struct IndicatorEstimate {
  IndicatorKind kind = IndicatorKind::order;
  GrowthMode mode = GrowthMode::M_based;
  double value_tail_sup = 0.0;
  double value_slope = 0.0;
  double slope_residual = 0.0;
  double window_lo = 0.0, window_hi = 0.0;
  bool monotone_trend = false;
  bool degenerate = false;      // growth too small for the scale chain; value 0
  std::vector<IndicatorSample> samples;    // all valid radii
  std::vector<double> excluded_radii;      // undefined iterated logs etc.
  int tail_excluded = 0;                   // exclusions falling in the window
  int tail_count = 0;
  /// True when more than a quarter of the tail window was excluded; scenario
  /// layers treat this as a failure.
  bool exclusion_budget_exceeded = false;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of deviations
};

/// Ordinary least squares over the given points. Throws on degenerate x-range
/// or fewer than 2 points.
SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points);

/// Max over the trailing window_fraction of samples.
double tail_sup(const std::vector<double>& values, double window_fraction);

/// Sample an entire function's growth curve on a grid (log M via circle max
/// or nonneg-coefficient shortcut, T via quadrature).
GrowthData sample_growth(const EntireFunction& f, const RadialGrid& grid,
                         const QuadraturePolicy& q = {}, const CirclePolicy& c = {});
GrowthData sample_growth(const MeromorphicFunction& f, const RadialGrid& grid,
                         const QuadraturePolicy& q = {});

/// Sample only the column the given mode needs. T-quadrature for indicator
/// sampling runs at a relaxed 1e-7 tolerance: slope/sup estimators cannot
/// resolve finer differences, and log+ kinks of doubly exponential functions
/// make 1e-8 unreachable within the panel budget at large radii.
GrowthData sample_growth_for(const EntireFunction& f, const RadialGrid& grid, GrowthMode mode);

/// (alpha,beta,gamma)-order estimate: tail-sup and OLS slope of
/// alpha(inner chain) against beta(log gamma(r)). Mode/shift select the inner
/// chain: log T, log^[2]T, log^[2]M, or log^[3]M.
IndicatorEstimate estimate_order(const GrowthData& data, const ScaleTriple& triple,
                                 GrowthMode mode, bool shifted, const RadialGrid& grid);

IndicatorEstimate estimate_order(const EntireFunction& f, const ScaleTriple& triple,
                                 const RadialGrid& grid, GrowthMode mode, bool shifted = false);

/// (alpha,beta,gamma)-type at the given order sigma: tail-sup of the defining
/// ratio, and the intercept-derived constant exp(mean(num - sigma*den)).
/// Requires 0 < sigma < +inf.
IndicatorEstimate estimate_type(const GrowthData& data, const ScaleTriple& triple,
                                double sigma, GrowthMode mode, bool shifted,
                                const RadialGrid& grid);

IndicatorEstimate estimate_type(const EntireFunction& f, const ScaleTriple& triple,
                                double sigma, const RadialGrid& grid, GrowthMode mode,
                                bool shifted = false);

}  // namespace growthlab
