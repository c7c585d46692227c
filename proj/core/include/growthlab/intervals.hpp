#pragma once

#include <cstdint>
#include <vector>

namespace growthlab {

/// Disjoint sorted intervals [a_i, b_i] in (1, +inf), stored by the logs of
/// their endpoints so endpoint magnitudes like exp(j^2) stay representable.
class IntervalSet {
 public:
  void add_log(double log_a, double log_b);  // must keep the set sorted/disjoint
  std::size_t size() const { return log_lo_.size(); }
  double log_lo(std::size_t i) const { return log_lo_[i]; }
  double log_hi(std::size_t i) const { return log_hi_[i]; }

  /// Logarithmic measure: sum of (log b_i - log a_i), compensated summation.
  double logarithmic_measure() const;

 private:
  std::vector<double> log_lo_, log_hi_;
};

struct IntervalMeasureResult {
  double measure = 0.0;           // exact partial logarithmic measure
  double closed_form = 0.0;       // log((N+1)/j3)
  bool spacing_ok = true;         // R_{j+1} > (1+1/j) R_j throughout
  std::vector<double> doubling_partials;  // partial measures at N, N/2, N/4, ...
};

/// Intervals [R_j, (1+1/j) R_j] for j = j3..N with R_j = exp(j^2); the
/// partial logarithmic measure telescopes to log((N+1)/j3). The measure is
/// accumulated term-by-term (Kahan) and compared against the closed form by
/// the caller.
IntervalMeasureResult interval_measure_exp_policy(std::int64_t j3, std::int64_t N);

/// Materialized set for small N (tests and evidence tables).
IntervalSet build_interval_set_exp_policy(std::int64_t j3, std::int64_t N);

}  // namespace growthlab
