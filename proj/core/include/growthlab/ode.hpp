#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "growthlab/expression.hpp"
#include "growthlab/growth.hpp"
#include "growthlab/scaled_complex.hpp"

namespace growthlab {

inline constexpr int kMaxOdeOrder = 8;

/// f^(k) + A_{k-1} f^(k-1) + ... + A_0 f = 0 with entire coefficients.
struct LinearODE {
  int order = 1;
  std::vector<EntireFunction> coefficients;  // A_0 .. A_{k-1}

  void validate() const;
  /// A_j value as ScaledComplex (overflow-safe path).
  ScaledComplex coefficient_at(int j, std::complex<double> z) const;
};

enum class TraceTermination { completed, step_budget, tolerance_failure };

std::string to_string(TraceTermination t);

/// One integrated ray: log-magnitudes and mantissa phases of f .. f^(k-1)
/// at the requested radii actually reached.
struct RayTrace {
  double theta = 0.0;
  int order = 1;
  struct Sample {
    double r;
    std::array<double, kMaxOdeOrder> log_abs;  // entries [0, order)
    std::array<double, kMaxOdeOrder> arg;
  };
  std::vector<Sample> samples;  // r strictly increasing
  TraceTermination termination = TraceTermination::completed;
  double terminal_radius = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
  long renorm_count = 0;

  ScaledComplex value(std::size_t sample_index, int derivative) const;
};

struct IntegrationOptions {
  double tol = 1e-9;           // local relative error per step, in [1e-12, 1e-6]
  long step_budget = 10000000; // accepted steps per ray
};

/// Adaptive Dormand-Prince 5(4) on the companion system along the ray
/// z = t e^{i theta}, with the state renormalized by a common log offset.
/// Samples are taken exactly at the given radii; a budget-terminated trace
/// keeps its partial samples.
RayTrace integrate_ray(const LinearODE& ode, const std::vector<ScaledComplex>& ics,
                       double theta, const std::vector<double>& sample_radii,
                       const IntegrationOptions& opts = {});

/// Ray fan: n equispaced directions minus excluded sectors.
struct FanSpec {
  int rays = 64;
  struct Sector {
    double center;
    double half_width;
  };
  std::vector<Sector> excluded_sectors;
  std::vector<double> angles() const;
};

/// An integrated solution: initial data at z0 = 0 plus one trace per fan
/// direction.
struct SolutionHandle {
  LinearODE ode;
  std::vector<ScaledComplex> initial_conditions;
  std::vector<double> sample_radii;
  std::vector<RayTrace> traces;

  struct LogM {
    double log_M;
    int contributing_rays;
  };
  /// Max of log|f| over rays alive at r (r must be one of the sample radii).
  std::optional<LogM> solution_log_M(double r) const;

  /// Smallest radius at which some ray died on the step budget; +inf when
  /// every ray completed or failed only on tolerance.
  double censor_radius() const;

  /// Fan average of log+ |f| at r (proximity proxy over the traced fan).
  std::optional<double> fan_proximity(double r) const;

  const RayTrace* trace_at(double theta) const;
};

/// Canonical basis: k handles with f_i^{(j)}(0) = delta_ij, each integrated
/// over the fan. Ray integrations run in parallel (`threads` <= 0 picks
/// hardware concurrency); results are deterministic regardless of scheduling.
std::vector<SolutionHandle> solution_basis(const LinearODE& ode, const FanSpec& fan,
                                           const std::vector<double>& sample_radii,
                                           const IntegrationOptions& opts = {},
                                           int threads = 0);

/// Growth curve of a handle on its sample radii. Radii past the censor
/// radius are marked absent and counted in censored_count.
GrowthData handle_growth_data(const SolutionHandle& handle, bool budget_censoring = true);

/// Wronskian of the basis at a traced point z (split-representation
/// determinant, scale factored out per row). Throws when |det| of the
/// normalized matrix falls below 1e-10.
ScaledComplex wronskian_at(const std::vector<SolutionHandle>& handles,
                           std::complex<double> z);

/// A_{k-s}(z) = -W_{k-s} / W with the (k-s)-derivative row replaced by k-th
/// derivatives obtained from the equation itself.
ScaledComplex reconstruct_coefficient(const std::vector<SolutionHandle>& handles,
                                      int s, std::complex<double> z);

/// Wronskian determinant of explicit entire functions (test-oracle variant).
ScaledComplex wronskian_at(const std::vector<EntireFunction>& basis,
                           std::complex<double> z);

/// Max over samples of | log|W(r)| - log|W(r0)| + Re integral of A_{k-1} |
/// relative to max(1, |log W|), along the ray theta. Independent Simpson
/// quadrature of the coefficient.
double abel_consistency(const std::vector<SolutionHandle>& handles, double theta);

}  // namespace growthlab
