#include "growthlab/scales.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace growthlab {

std::string to_string(ScaleClass c) {
  switch (c) {
    case ScaleClass::L1: return "L1";
    case ScaleClass::L2: return "L2";
    case ScaleClass::L3: return "L3";
  }
  return "?";
}

double iter_log(int k, double x) {
  if (k < -1) throw std::domain_error("iter_log: depth must be >= -1");
  if (k == -1) return std::exp(x);
  double v = x;
  for (int i = 1; i <= k; ++i) {
    if (v <= 0.0) {
      std::ostringstream os;
      os << "iter_log: argument nonpositive at depth " << i << " of " << k;
      throw std::domain_error(os.str());
    }
    v = std::log(v);
  }
  return v;
}

double iter_exp(int k, double x) {
  if (k < -1) throw std::domain_error("iter_exp: depth must be >= -1");
  if (k == -1) {
    if (x <= 0.0) throw std::domain_error("iter_exp: log of nonpositive argument");
    return std::log(x);
  }
  double v = x;
  for (int i = 0; i < k; ++i) v = std::exp(v);
  return v;
}

ScaleFunction ScaleFunction::identity() {
  ScaleFunction s;
  s.kind_ = Kind::Identity;
  s.id_ = "identity";
  s.x0_ = 0.0;
  s.r0_ = 0.0;
  s.declared_ = ScaleClass::L3;
  return s;
}

ScaleFunction ScaleFunction::iterated_log(int depth) {
  if (depth < 1) throw std::invalid_argument("iter_log scale: depth must be >= 1");
  ScaleFunction s;
  s.kind_ = Kind::IterLog;
  s.id_ = "iter_log(" + std::to_string(depth) + ")";
  s.param_ = depth;
  // alpha(x0) = 0: x0 = exp^[depth](0).
  s.x0_ = iter_exp(depth, 0.0);
  s.r0_ = 2.0 * s.x0_;  // log(a+b) <= log a + log b for a,b >= 2 (depth 1)
  s.c_ = 0.0;
  s.declared_ = ScaleClass::L1;
  s.in_l3_ = false;
  return s;
}

ScaleFunction ScaleFunction::power(double exponent) {
  if (!(exponent > 0.0) || exponent > 1.0)
    throw std::invalid_argument("power scale: exponent must be in (0, 1] (s > 1 is not subadditive)");
  ScaleFunction s;
  s.kind_ = Kind::Power;
  s.id_ = "power(" + std::to_string(exponent) + ")";
  s.param_ = exponent;
  s.declared_ = ScaleClass::L3;
  return s;
}

ScaleFunction ScaleFunction::power_unchecked(double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("power scale: exponent must be positive");
  ScaleFunction s;
  s.kind_ = Kind::Power;
  s.id_ = "power_unchecked(" + std::to_string(exponent) + ")";
  s.param_ = exponent;
  s.declared_ = ScaleClass::L3;
  s.in_l1_ = s.in_l2_ = s.in_l3_ = false;
  return s;
}

ScaleFunction ScaleFunction::affine(double slope, double shift) {
  if (!(slope > 0.0)) throw std::invalid_argument("affine scale: slope must be positive");
  if (shift < 0.0) throw std::invalid_argument("affine scale: shift must be nonnegative");
  ScaleFunction s;
  s.kind_ = Kind::Affine;
  s.id_ = "affine(" + std::to_string(slope) + "," + std::to_string(shift) + ")";
  s.param_ = slope;
  s.shift_ = shift;
  s.declared_ = ScaleClass::L3;
  return s;
}

double ScaleFunction::eval(double x) const {
  if (x < x0_) x = x0_;
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::IterLog: return iter_log(static_cast<int>(param_), x);
    case Kind::Power: return std::pow(x, param_);
    case Kind::Affine: return param_ * x + shift_;
  }
  return x;
}

double ScaleFunction::inverse(double y) const {
  double y0 = eval(x0_);
  if (y < y0 - 1e-12 * std::max(1.0, std::abs(y0)))
    throw std::domain_error("scale inverse: value below range (y < alpha(x0))");
  switch (kind_) {
    case Kind::Identity: return y;
    case Kind::IterLog: return iter_exp(static_cast<int>(param_), y);
    case Kind::Power: return std::pow(y, 1.0 / param_);
    case Kind::Affine: return (y - shift_) / param_;
  }
  return y;
}

bool ScaleFunction::member_of(ScaleClass c) const {
  switch (c) {
    case ScaleClass::L1: return in_l1_ || in_l3_;  // L3 subset of L1
    case ScaleClass::L2: return in_l2_;
    case ScaleClass::L3: return in_l3_;
  }
  return false;
}

ScaleFunction builtin_scale(const std::string& name, const std::vector<double>& params) {
  auto need = [&](size_t n) {
    if (params.size() < n)
      throw std::invalid_argument("scale '" + name + "': missing parameter");
  };
  if (name == "identity") return ScaleFunction::identity();
  if (name == "iter_log") {
    need(1);
    return ScaleFunction::iterated_log(static_cast<int>(params[0]));
  }
  if (name == "power") {
    need(1);
    return ScaleFunction::power(params[0]);
  }
  if (name == "affine") {
    need(1);
    return ScaleFunction::affine(params[0], params.size() > 1 ? params[1] : 0.0);
  }
  throw std::invalid_argument("unknown scale name: '" + name + "'");
}

bool ScaleTriple::condition_i() const {
  return alpha.member_of(ScaleClass::L1) && beta.member_of(ScaleClass::L2) &&
         gamma.member_of(ScaleClass::L3);
}

std::vector<double> geometric_grid(double lo, double hi, int points_per_decade) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("geometric_grid: need 0 < lo < hi");
  std::vector<double> g;
  double decades = std::log10(hi / lo);
  int n = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
  g.reserve(n);
  for (int i = 0; i < n; ++i)
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

namespace {

std::string describe_grid(const std::vector<double>& grid) {
  std::ostringstream os;
  os << grid.size() << " points in [" << grid.front() << ", " << grid.back() << "]";
  return os.str();
}

// Subsample so pair scans stay ~10^4 regardless of grid size.
std::vector<double> thin(const std::vector<double>& grid, size_t target) {
  if (grid.size() <= target) return grid;
  std::vector<double> out;
  out.reserve(target);
  for (size_t i = 0; i < target; ++i)
    out.push_back(grid[i * (grid.size() - 1) / (target - 1)]);
  return out;
}

}  // namespace

ClassReport check_class(const ScaleFunction& scale, ScaleClass cls,
                        const std::vector<double>& grid, const ClassCheckOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("check_class: empty grid");
  for (double x : grid)
    if (x < scale.threshold_R0())
      throw std::invalid_argument("check_class: grid point below the scale's R0");

  ClassReport rep;
  rep.scale_id = scale.id();
  rep.class_tested = to_string(cls);
  rep.grid_description = describe_grid(grid);

  if (cls == ScaleClass::L2) {
    // Translation stability on the top decade of the grid.
    double top = grid.back() / 10.0;
    double worst = 0.0;
    std::vector<double> wit;
    double first_half_max = 0.0, second_half_max = 0.0;
    std::vector<std::pair<double, double>> devs;
    for (double x : grid) {
      if (x < top) continue;
      double ax = scale.eval(x);
      if (ax <= 0.0) continue;
      for (double d : opts.l2_offsets) {
        if (x + d <= scale.floor_x0()) continue;
        double dev = std::abs(scale.eval(x + d) / ax - 1.0);
        devs.emplace_back(x, dev);
        if (dev > worst) {
          worst = dev;
          wit = {x, d};
        }
      }
    }
    if (devs.size() < 4) throw std::invalid_argument("check_class(L2): top decade too sparse");
    double mid = std::sqrt(top * grid.back() * 10.0);
    for (auto& [x, dev] : devs)
      (x < mid ? first_half_max : second_half_max) = std::max(x < mid ? first_half_max : second_half_max, dev);
    rep.worst_violation = worst;
    rep.tolerance = opts.l2_tolerance;
    rep.witness = wit;
    bool trend_ok = second_half_max <= first_half_max + 1e-12;
    rep.pass = worst <= opts.l2_tolerance && trend_ok;
    if (!trend_ok) rep.notes.push_back("deviation not decreasing across the top decade");
    rep.notes.push_back("o(1) verified on finite data only: no counterexample found");
    return rep;
  }

  // L1 / L3: additive violations over grid pairs.
  std::vector<double> pts = thin(grid, 128);
  if (pts.size() * pts.size() < 100) throw std::invalid_argument("check_class: need >= 100 pairs");
  double c = cls == ScaleClass::L1 ? scale.quasi_additive_c() : 0.0;
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> wit;
  for (double a : pts) {
    double fa = scale.eval(a);
    for (double b : pts) {
      double v = scale.eval(a + b) - fa - scale.eval(b) - c;
      if (v > worst) {
        worst = v;
        wit = {a, b};
      }
    }
  }
  rep.worst_violation = worst;
  rep.tolerance = opts.additive_slack * std::max(1.0, std::abs(scale.eval(grid.back())));
  rep.witness = wit;
  rep.pass = worst <= rep.tolerance;
  return rep;
}

ClassReport check_triple(const ScaleTriple& triple, const std::vector<double>& grid,
                         const TripleCheckOptions& opts) {
  if (grid.size() < 8) throw std::invalid_argument("check_triple: grid too small");
  if (grid.back() / grid.front() < 1e4)
    throw std::invalid_argument("check_triple: grid must span >= 4 decades");

  ClassReport rep;
  rep.scale_id = triple.alpha.id() + "," + triple.beta.id() + "," + triple.gamma.id();
  rep.class_tested = "triple";
  rep.grid_description = describe_grid(grid);
  rep.pass = true;

  if (!triple.condition_i()) {
    rep.pass = false;
    rep.notes.push_back("condition (i) failed: require alpha in L1, beta in L2, gamma in L3");
    return rep;
  }

  auto check_sequence = [&](const std::vector<double>& seq, double threshold,
                            const std::string& label) {
    if (seq.size() < 4) {
      rep.pass = false;
      rep.notes.push_back(label + ": too few defined points");
      return;
    }
    size_t half = seq.size() / 2;
    bool monotone = true;
    for (size_t i = half + 1; i < seq.size(); ++i)
      if (seq[i] > seq[i - 1] + opts.monotone_slack) monotone = false;
    bool small = seq.back() < threshold;
    // Deeply iterated logs can still be climbing away from the scale floor at
    // any feasible grid end (their decay starts beyond ~1e20); a sequence an
    // order of magnitude under its threshold is accepted without the
    // monotonicity requirement.
    bool deeply_small = seq.back() < 0.1 * threshold;
    if (!(small && (monotone || deeply_small))) {
      rep.pass = false;
      std::ostringstream os;
      os << label << ": last=" << seq.back() << " threshold=" << threshold
         << (monotone ? "" : " (not non-increasing over top half)");
      rep.notes.push_back(os.str());
    }
    rep.worst_violation = std::max(rep.worst_violation, seq.back() / std::max(threshold, 1e-300));
  };

  // alpha(log^[p] x) = o(beta(log gamma(x))), p = 2..p_max. Points where the
  // inner chain sits at or below alpha's floor carry no information (the
  // floored value is constant) and are excluded rather than clamped.
  for (int p = 2; p <= triple.p_max; ++p) {
    std::vector<double> seq;
    int undefined = 0;
    for (double x : grid) {
      double inner, den;
      try {
        inner = iter_log(p, x);
        den = triple.beta.eval(std::log(triple.gamma.eval(x)));
      } catch (const std::domain_error&) {
        ++undefined;
        continue;
      }
      if (den <= 0.0 || inner <= triple.alpha.floor_x0()) {
        ++undefined;
        continue;
      }
      seq.push_back(triple.alpha.eval(inner) / den);
    }
    if (seq.empty()) throw std::domain_error("check_triple: log^[p] undefined on entire grid, p=" + std::to_string(p));
    check_sequence(seq, opts.ratio_log_threshold, "alpha(log^[" + std::to_string(p) + "]x)/beta(log gamma x)");
    if (undefined) rep.notes.push_back(std::to_string(undefined) + " grid points excluded at p=" + std::to_string(p));
  }

  // alpha(log x) = o(alpha(x)).
  {
    std::vector<double> seq;
    for (double x : grid) {
      if (x <= 0.0 || std::log(x) <= triple.alpha.floor_x0()) continue;
      double den = triple.alpha.eval(x);
      if (den <= 0.0) continue;
      seq.push_back(triple.alpha.eval(std::log(x)) / den);
    }
    check_sequence(seq, opts.ratio_self_threshold, "alpha(log x)/alpha(x)");
  }

  // alpha^{-1}(k y) = o(alpha^{-1}(y)) sampled at y = alpha(x).
  for (double k : opts.inverse_ks) {
    std::vector<double> seq;
    double y_floor = triple.alpha.eval(triple.alpha.floor_x0());
    for (double x : grid) {
      double y = triple.alpha.eval(x);
      if (!(k * y > y_floor)) continue;
      double den = triple.alpha.inverse(y);
      if (den <= 0.0) continue;
      seq.push_back(triple.alpha.inverse(k * y) / den);
    }
    std::ostringstream label;
    label << "alpha^{-1}(" << k << " y)/alpha^{-1}(y)";
    check_sequence(seq, opts.ratio_inverse_threshold, label.str());
  }

  return rep;
}

double fit_quasi_additive_c(const ScaleFunction& scale, const std::vector<double>& grid) {
  std::vector<double> pts = thin(grid, 128);
  double worst = 0.0;
  for (double a : pts) {
    if (a < scale.threshold_R0()) continue;
    double fa = scale.eval(a);
    for (double b : pts) {
      if (b < scale.threshold_R0()) continue;
      worst = std::max(worst, scale.eval(a + b) - fa - scale.eval(b));
    }
  }
  return worst;
}

}  // namespace growthlab
