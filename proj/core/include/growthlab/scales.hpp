#pragma once

#include <optional>
#include <string>
#include <vector>

namespace growthlab {

enum class ScaleClass { L1, L2, L3 };

std::string to_string(ScaleClass c);

/// Iterated logarithm, paper convention: log^[0] x = x, log^[-1] x = exp x.
/// Throws std::domain_error naming the failing depth when an inner log
/// argument is nonpositive.
double iter_log(int k, double x);

/// Iterated exponential: exp^[0] x = x, exp^[-1] x = log x.
double iter_exp(int k, double x);

/// A growth-scale function from the built-in catalog: nondecreasing,
/// unbounded, constant below the floor x0, with an exact inverse.
class ScaleFunction {
 public:
  enum class Kind { Identity, IterLog, Power, Affine };

  static ScaleFunction identity();
  static ScaleFunction iterated_log(int depth);
  static ScaleFunction power(double exponent);             // 0 < s <= 1
  static ScaleFunction affine(double slope, double shift); // a > 0, b >= 0
  /// Unvalidated power scale for negative-control tests (e.g. x^2).
  /// Declares membership in no class.
  static ScaleFunction power_unchecked(double exponent);

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;

  /// Exact inverse on [alpha(x0), +inf). Throws std::domain_error below range.
  double inverse(double y) const;

  const std::string& id() const { return id_; }
  Kind kind() const { return kind_; }
  double floor_x0() const { return x0_; }
  double threshold_R0() const { return r0_; }
  double quasi_additive_c() const { return c_; }
  ScaleClass declared_class() const { return declared_; }

  /// Analytic class membership for catalog scales (L3 subset of L1).
  bool member_of(ScaleClass c) const;

  void set_quasi_additive_c(double c) { c_ = c; }

 private:
  ScaleFunction() = default;

  Kind kind_ = Kind::Identity;
  std::string id_;
  double param_ = 0.0;   // depth for IterLog, exponent for Power, slope for Affine
  double shift_ = 0.0;   // Affine intercept
  double x0_ = 0.0;      // floor: alpha(x) = alpha(x0) for x <= x0
  double r0_ = 0.0;      // class inequalities asserted above this point
  double c_ = 0.0;       // L1 quasi-additivity constant
  ScaleClass declared_ = ScaleClass::L3;
  bool in_l1_ = true, in_l2_ = true, in_l3_ = true;
};

/// Catalog lookup. Names: "identity", "iter_log" (params[0]=k),
/// "power" (params[0]=s, 0<s<=1), "affine" (params[0]=a>0, params[1]=b>=0).
ScaleFunction builtin_scale(const std::string& name, const std::vector<double>& params);

struct ScaleTriple {
  ScaleFunction alpha = ScaleFunction::identity();
  ScaleFunction beta = ScaleFunction::identity();
  ScaleFunction gamma = ScaleFunction::identity();
  int p_max = 3;

  /// Condition (i): alpha in L1, beta in L2, gamma in L3.
  bool condition_i() const;
};

struct ClassReport {
  std::string scale_id;
  std::string class_tested;       // "L1", "L2", "L3" or "triple"
  std::string grid_description;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::vector<double> witness;    // point(s) attaining the worst violation
  bool pass = false;
  std::vector<std::string> notes;
};

/// Geometric grid, points_per_decade per decade of [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, int points_per_decade);

struct ClassCheckOptions {
  double l2_tolerance = 0.05;     // max |alpha(x+d)/alpha(x) - 1| on the top decade
  std::vector<double> l2_offsets = {-10.0, -5.0, -2.0, -1.0, 1.0, 2.0, 5.0, 10.0};
  double additive_slack = 1e-9;   // scaled slack for L1/L3 comparisons
};

/// Measure class-membership violations on a grid. L3: max alpha(a+b)-alpha(a)-alpha(b)
/// over pairs; L1: same minus c; L2: translation-stability deviation on the top
/// decade. Grid points must be >= R0 and supply at least 100 pairs.
ClassReport check_class(const ScaleFunction& scale, ScaleClass cls,
                        const std::vector<double>& grid,
                        const ClassCheckOptions& opts = {});

struct TripleCheckOptions {
  // Thresholds on the final value of each condition-(ii) ratio sequence.
  double ratio_log_threshold = 0.25;      // alpha(log^[p] x) / beta(log gamma(x))
  double ratio_self_threshold = 0.25;     // alpha(log x) / alpha(x)
  double ratio_inverse_threshold = 1.0 - 1e-6;  // alpha^{-1}(kx) / alpha^{-1}(x)
  std::vector<double> inverse_ks = {0.25, 0.5, 0.9};
  double monotone_slack = 1e-9;
};

/// Condition (i) and the sampled condition-(ii) ratio sequences for
/// p = 2..p_max. Pass iff (i) holds and every sequence is non-increasing
/// over the top half of the grid with final value below its threshold.
ClassReport check_triple(const ScaleTriple& triple, const std::vector<double>& grid,
                         const TripleCheckOptions& opts = {});

/// Empirical quasi-additivity constant: max(0, max over grid pairs of
/// alpha(a+b) - alpha(a) - alpha(b)).
double fit_quasi_additive_c(const ScaleFunction& scale, const std::vector<double>& grid);

}  // namespace growthlab
