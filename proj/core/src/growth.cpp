#include "growthlab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace growthlab {

std::vector<double> RadialGrid::radii() const {
  if (count < 2 || !(r0 > 0.0) || !(ratio > 1.0))
    throw std::invalid_argument("RadialGrid: need count >= 2, r0 > 0, ratio > 1");
  std::vector<double> rs(count);
  double r = r0;
  for (int i = 0; i < count; ++i, r *= ratio) rs[i] = r;
  return rs;
}

double RadialGrid::r_max() const { return r0 * std::pow(ratio, count - 1); }

std::string to_string(GrowthMode m) {
  return m == GrowthMode::T_based ? "T_based" : "M_based";
}

std::string to_string(IndicatorKind k) {
  switch (k) {
    case IndicatorKind::order: return "order";
    case IndicatorKind::order_log_shifted: return "order_log_shifted";
    case IndicatorKind::type: return "type";
    case IndicatorKind::type_M: return "type_M";
    case IndicatorKind::type_log_shifted: return "type_log_shifted";
  }
  return "?";
}

SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("slope_fit: need at least 2 points");
  double sx = 0, sy = 0;
  for (auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  double mx = sx / points.size(), my = sy / points.size();
  double sxx = 0, sxy = 0;
  for (auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 1e-14 * std::max(1.0, mx * mx) * points.size())
    throw std::invalid_argument("slope_fit: degenerate x-range");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (auto& [x, y] : points) {
    double d = y - (f.slope * x + f.intercept);
    ss += d * d;
  }
  f.residual = std::sqrt(ss / points.size());
  return f;
}

double tail_sup(const std::vector<double>& values, double window_fraction) {
  if (values.empty()) throw std::invalid_argument("tail_sup: empty input");
  std::size_t n = values.size();
  std::size_t w = std::max<std::size_t>(1, std::size_t(std::ceil(window_fraction * n)));
  return *std::max_element(values.end() - w, values.end());
}

GrowthData sample_growth(const EntireFunction& f, const RadialGrid& grid,
                         const QuadraturePolicy& q, const CirclePolicy& c) {
  GrowthData d;
  d.radii = grid.radii();
  d.log_M.resize(d.radii.size());
  d.T.resize(d.radii.size());
  for (std::size_t i = 0; i < d.radii.size(); ++i) {
    d.log_M[i] = log_max_modulus(f, d.radii[i], c).log_M;
    d.T[i] = proximity_m(f, d.radii[i], q);  // entire: T = m
  }
  return d;
}

GrowthData sample_growth(const MeromorphicFunction& f, const RadialGrid& grid,
                         const QuadraturePolicy& q) {
  GrowthData d;
  d.radii = grid.radii();
  d.log_M.resize(d.radii.size());
  d.T.resize(d.radii.size());
  for (std::size_t i = 0; i < d.radii.size(); ++i) {
    double r = d.radii[i];
    d.T[i] = proximity_m(f, r, q) + counting_N(f, r);
  }
  return d;
}

GrowthData sample_growth_for(const EntireFunction& f, const RadialGrid& grid, GrowthMode mode) {
  GrowthData d;
  d.radii = grid.radii();
  d.log_M.resize(d.radii.size());
  d.T.resize(d.radii.size());
  QuadraturePolicy q;
  q.rel_tol = 1e-7;
  for (std::size_t i = 0; i < d.radii.size(); ++i) {
    if (mode == GrowthMode::M_based)
      d.log_M[i] = log_max_modulus(f, d.radii[i]).log_M;
    else
      d.T[i] = proximity_m(f, d.radii[i], q);
  }
  return d;
}

namespace {

// Inner chain before alpha: log T, log^[2] T, log^[2] M or log^[3] M.
// log of a nonpositive value propagates -inf (alpha floors it); a second log
// of -inf is NaN and excludes the radius.
std::optional<double> inner_chain(const GrowthData& d, std::size_t i, GrowthMode mode,
                                  bool shifted) {
  auto safe_log = [](double x) {
    return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
  };
  if (mode == GrowthMode::T_based) {
    if (!d.T[i]) return std::nullopt;
    double v = safe_log(*d.T[i]);  // log T
    if (!shifted) return v;
    if (!std::isfinite(v)) return std::nullopt;
    return safe_log(v);  // log^[2] T
  }
  if (!d.log_M[i]) return std::nullopt;
  double v = safe_log(*d.log_M[i]);  // log^[2] M
  if (!shifted) return v;
  if (!std::isfinite(v)) return std::nullopt;
  return safe_log(v);  // log^[3] M
}

struct ChainSamples {
  std::vector<IndicatorSample> samples;   // numerator = alpha(chain), denominator = beta(log gamma r)
  std::vector<double> excluded;
};

ChainSamples collect(const GrowthData& d, const ScaleTriple& triple, GrowthMode mode,
                     bool shifted) {
  ChainSamples out;
  for (std::size_t i = 0; i < d.radii.size(); ++i) {
    double r = d.radii[i];
    auto chain = inner_chain(d, i, mode, shifted);
    double den = 0.0;
    bool den_ok = false;
    double g = triple.gamma.eval(r);
    if (g > 0.0) {
      den = triple.beta.eval(std::log(g));
      den_ok = den > 0.0;
    }
    if (!chain || !den_ok || std::isnan(*chain)) {
      out.excluded.push_back(r);
      continue;
    }
    double num = triple.alpha.eval(*chain);  // -inf floors to alpha(x0)
    if (std::isnan(num)) {
      out.excluded.push_back(r);
      continue;
    }
    out.samples.push_back({r, num, den, num / den});
  }
  return out;
}

std::size_t tail_start(std::size_t n, double window_fraction) {
  std::size_t w = std::max<std::size_t>(1, std::size_t(std::ceil(window_fraction * n)));
  return n - w;
}

}  // namespace

IndicatorEstimate estimate_order(const GrowthData& data, const ScaleTriple& triple,
                                 GrowthMode mode, bool shifted, const RadialGrid& grid) {
  IndicatorEstimate est;
  est.kind = shifted ? IndicatorKind::order_log_shifted : IndicatorKind::order;
  est.mode = mode;

  ChainSamples cs = collect(data, triple, mode, shifted);
  est.samples = cs.samples;
  est.excluded_radii = cs.excluded;

  if (cs.samples.empty()) {
    // Bounded growth: the whole chain is undefined everywhere. By the floor
    // convention the indicator is zero.
    est.degenerate = true;
    est.value_tail_sup = 0.0;
    est.value_slope = 0.0;
    est.monotone_trend = true;
    return est;
  }

  std::size_t start = tail_start(cs.samples.size(), grid.window_fraction);
  if (cs.samples.size() - start < 8) {
    if (cs.samples.size() < 8)
      throw std::runtime_error("estimate_order: fewer than 8 valid tail samples");
    start = cs.samples.size() - 8;
  }
  est.window_lo = cs.samples[start].r;
  est.window_hi = cs.samples.back().r;

  // Interior holes inside the fitted window count against the exclusion
  // budget; censored radii beyond the last valid sample are reported but do
  // not (the window simply ends earlier).
  est.tail_count = int(cs.samples.size() - start);
  for (double r : cs.excluded)
    if (r >= est.window_lo && r <= est.window_hi) ++est.tail_excluded;
  est.exclusion_budget_exceeded = est.tail_excluded * 4 > est.tail_count;

  double sup = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> pts;
  bool monotone = true;
  for (std::size_t i = start; i < cs.samples.size(); ++i) {
    sup = std::max(sup, cs.samples[i].ratio);
    pts.emplace_back(cs.samples[i].denominator, cs.samples[i].numerator);
    if (i > start && cs.samples[i].ratio > cs.samples[i - 1].ratio + 1e-9) monotone = false;
  }
  est.value_tail_sup = sup;
  est.monotone_trend = monotone;
  SlopeFit fit = slope_fit(pts);
  est.value_slope = fit.slope;
  est.slope_residual = fit.residual;
  return est;
}

IndicatorEstimate estimate_order(const EntireFunction& f, const ScaleTriple& triple,
                                 const RadialGrid& grid, GrowthMode mode, bool shifted) {
  return estimate_order(sample_growth_for(f, grid, mode), triple, mode, shifted, grid);
}

IndicatorEstimate estimate_type(const GrowthData& data, const ScaleTriple& triple,
                                double sigma, GrowthMode mode, bool shifted,
                                const RadialGrid& grid) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("estimate_type: sigma must be in (0, +inf)");

  IndicatorEstimate est;
  est.kind = shifted ? IndicatorKind::type_log_shifted
                     : (mode == GrowthMode::M_based ? IndicatorKind::type_M : IndicatorKind::type);
  est.mode = mode;

  ChainSamples cs = collect(data, triple, mode, shifted);
  // The type ratio: exp(num - sigma * den).
  est.excluded_radii = cs.excluded;
  for (auto& s : cs.samples) est.samples.push_back({s.r, s.numerator, s.denominator,
                                                    std::exp(s.numerator - sigma * s.denominator)});
  if (cs.samples.empty()) {
    est.degenerate = true;
    return est;
  }
  std::size_t start = tail_start(est.samples.size(), grid.window_fraction);
  if (est.samples.size() - start < 8 && est.samples.size() >= 8)
    start = est.samples.size() - 8;
  est.window_lo = est.samples[start].r;
  est.window_hi = est.samples.back().r;

  double sup = 0.0, mean = 0.0;
  std::size_t n = 0;
  bool monotone = true;
  for (std::size_t i = start; i < est.samples.size(); ++i) {
    sup = std::max(sup, est.samples[i].ratio);
    mean += est.samples[i].numerator - sigma * est.samples[i].denominator;
    ++n;
    if (i > start && est.samples[i].ratio > est.samples[i - 1].ratio + 1e-9) monotone = false;
  }
  est.value_tail_sup = sup;
  est.value_slope = std::exp(mean / double(n));  // intercept-derived constant
  est.monotone_trend = monotone;
  return est;
}

IndicatorEstimate estimate_type(const EntireFunction& f, const ScaleTriple& triple,
                                double sigma, const RadialGrid& grid, GrowthMode mode,
                                bool shifted) {
  return estimate_type(sample_growth_for(f, grid, mode), triple, sigma, mode, shifted, grid);
}

}  // namespace growthlab
