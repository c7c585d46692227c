#include "growthlab/intervals.hpp"

#include <cmath>
#include <stdexcept>

namespace growthlab {

void IntervalSet::add_log(double log_a, double log_b) {
  if (!(log_a > 0.0) || !(log_b > log_a))
    throw std::invalid_argument("IntervalSet: need 1 < a < b");
  if (!log_lo_.empty() && log_a <= log_hi_.back())
    throw std::invalid_argument("IntervalSet: intervals must stay sorted and disjoint");
  log_lo_.push_back(log_a);
  log_hi_.push_back(log_b);
}

double IntervalSet::logarithmic_measure() const {
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < log_lo_.size(); ++i) {
    double term = log_hi_[i] - log_lo_[i];
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

IntervalMeasureResult interval_measure_exp_policy(std::int64_t j3, std::int64_t N) {
  if (j3 < 1 || N < j3) throw std::invalid_argument("interval measure: need 1 <= j3 <= N");
  IntervalMeasureResult res;

  // Spacing condition in logs: j^2 + log(1+1/j) < (j+1)^2, i.e.
  // log(1+1/j) < 2j+1 — true for all j >= 1, verified as we go.
  double sum = 0.0, comp = 0.0;
  std::int64_t next_double_mark = N;
  std::vector<std::int64_t> marks;
  while (next_double_mark >= j3) {
    marks.push_back(next_double_mark);
    next_double_mark /= 2;
  }
  std::size_t mark_idx = marks.size();

  for (std::int64_t j = j3; j <= N; ++j) {
    double width = std::log1p(1.0 / double(j));
    if (!(width < 2.0 * double(j) + 1.0)) res.spacing_ok = false;
    double y = width - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    while (mark_idx > 0 && j == marks[mark_idx - 1]) {
      res.doubling_partials.push_back(sum);
      --mark_idx;
    }
  }
  res.measure = sum;
  res.closed_form = std::log(double(N + 1) / double(j3));
  return res;
}

IntervalSet build_interval_set_exp_policy(std::int64_t j3, std::int64_t N) {
  if (N - j3 > 1000000) throw std::invalid_argument("interval set: too many intervals to materialize");
  IntervalSet set;
  for (std::int64_t j = j3; j <= N; ++j) {
    double lo = double(j) * double(j);
    set.add_log(lo, lo + std::log1p(1.0 / double(j)));
  }
  return set;
}

}  // namespace growthlab
