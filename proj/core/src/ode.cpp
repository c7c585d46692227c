#include "growthlab/ode.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace growthlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
using cplx = std::complex<double>;
using State = std::array<cplx, kMaxOdeOrder>;
}  // namespace

void LinearODE::validate() const {
  if (order < 1 || order > kMaxOdeOrder)
    throw std::invalid_argument("LinearODE: order must be in [1, 8]");
  if (static_cast<int>(coefficients.size()) != order)
    throw std::invalid_argument("LinearODE: need exactly `order` coefficients A_0..A_{k-1}");
}

ScaledComplex LinearODE::coefficient_at(int j, cplx z) const {
  return coefficients.at(j).eval(z);
}

std::string to_string(TraceTermination t) {
  switch (t) {
    case TraceTermination::completed: return "completed";
    case TraceTermination::step_budget: return "step_budget";
    case TraceTermination::tolerance_failure: return "tolerance_failure";
  }
  return "?";
}

ScaledComplex RayTrace::value(std::size_t sample_index, int derivative) const {
  const Sample& s = samples.at(sample_index);
  if (derivative < 0 || derivative >= order)
    throw std::invalid_argument("RayTrace::value: derivative out of range");
  double la = s.log_abs[derivative];
  if (!std::isfinite(la)) return ScaledComplex::zero();
  return ScaledComplex::from_log_polar(la, s.arg[derivative]);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// y5 - y4 error weights (B - Bhat).
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

struct RaySystem {
  const LinearODE* ode;
  cplx dir;  // e^{i theta}
  int k;
  // Nonzero coefficients only (index, function).
  std::vector<std::pair<int, const EntireFunction*>> terms;

  void operator()(double t, const State& y, State& dy) const {
    cplx z = t * dir;
    for (int j = 0; j + 1 < k; ++j) dy[j] = dir * y[j + 1];
    cplx acc = 0.0;
    for (const auto& [j, fn] : terms) acc += fn->eval_complex(z) * y[j];
    dy[k - 1] = -dir * acc;
  }
};

double max_norm(const State& y, int k) {
  double m = 0.0;
  for (int j = 0; j < k; ++j) m = std::max(m, std::abs(y[j]));
  return m;
}

}  // namespace

RayTrace integrate_ray(const LinearODE& ode, const std::vector<ScaledComplex>& ics,
                       double theta, const std::vector<double>& sample_radii,
                       const IntegrationOptions& opts) {
  ode.validate();
  const int k = ode.order;
  if (static_cast<int>(ics.size()) != k)
    throw std::invalid_argument("integrate_ray: need k initial values");
  if (!(opts.tol >= 1e-12 && opts.tol <= 1e-6))
    throw std::invalid_argument("integrate_ray: tol must lie in [1e-12, 1e-6]");
  if (sample_radii.empty())
    throw std::invalid_argument("integrate_ray: no sample radii");
  for (std::size_t i = 0; i < sample_radii.size(); ++i) {
    if (!(sample_radii[i] > 0.0) || (i && sample_radii[i] <= sample_radii[i - 1]))
      throw std::invalid_argument("integrate_ray: sample radii must be positive and increasing");
  }

  RayTrace trace;
  trace.theta = theta;
  trace.order = k;

  RaySystem sys;
  sys.ode = &ode;
  sys.dir = std::polar(1.0, theta);
  sys.k = k;
  for (int j = 0; j < k; ++j)
    if (!ode.coefficients[j].is_identically_zero())
      sys.terms.emplace_back(j, &ode.coefficients[j]);

  // Common-scale split state: value_j = y[j] * exp(offset).
  State y{};
  double offset = 0.0;
  {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& v : ics) top = std::max(top, v.log_abs());
    if (!std::isfinite(top))
      throw std::invalid_argument("integrate_ray: all-zero initial data");
    offset = top;
    for (int j = 0; j < k; ++j) {
      double la = ics[j].log_abs();
      y[j] = ics[j].is_zero() ? cplx(0.0) : std::polar(std::exp(la - top), ics[j].arg());
    }
  }

  const double r_max = sample_radii.back();
  const double h_min = r_max * 1e-14;
  const double rtol = opts.tol;
  const double atol = 1e-300;

  State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;
  double t = 0.0;
  std::size_t next_sample = 0;
  sys(t, y, k1);
  double h = std::min(1e-2, sample_radii.front());
  {
    double d0 = max_norm(y, k), d1 = max_norm(k1, k);
    if (d1 > 0.0) h = std::min(h, 0.01 * std::max(d0, 1.0) / d1);
  }

  auto record_if_sample = [&](double tt) {
    while (next_sample < sample_radii.size() &&
           std::abs(tt - sample_radii[next_sample]) <= 1e-12 * sample_radii[next_sample]) {
      RayTrace::Sample s;
      s.r = sample_radii[next_sample];
      for (int j = 0; j < k; ++j) {
        double a = std::abs(y[j]);
        s.log_abs[j] = a == 0.0 ? -std::numeric_limits<double>::infinity()
                                : offset + std::log(a);
        s.arg[j] = std::arg(y[j]);
      }
      trace.samples.push_back(s);
      ++next_sample;
    }
  };

  bool failed = false;
  while (next_sample < sample_radii.size()) {
    if (trace.accepted_steps >= opts.step_budget) {
      trace.termination = TraceTermination::step_budget;
      trace.terminal_radius = t;
      return trace;
    }
    // Step exactly onto the next sample radius when we would cross it.
    double target = sample_radii[next_sample];
    if (t + h >= target) h = target - t;
    if (h < h_min) h = h_min;

    // Stages (FSAL: k1 holds f(t, y)).
    for (int j = 0; j < k; ++j) ytmp[j] = y[j] + h * (A21 * k1[j]);
    sys(t + h / 5, ytmp, k2);
    for (int j = 0; j < k; ++j) ytmp[j] = y[j] + h * (A31 * k1[j] + A32 * k2[j]);
    sys(t + 3 * h / 10, ytmp, k3);
    for (int j = 0; j < k; ++j) ytmp[j] = y[j] + h * (A41 * k1[j] + A42 * k2[j] + A43 * k3[j]);
    sys(t + 4 * h / 5, ytmp, k4);
    for (int j = 0; j < k; ++j)
      ytmp[j] = y[j] + h * (A51 * k1[j] + A52 * k2[j] + A53 * k3[j] + A54 * k4[j]);
    sys(t + 8 * h / 9, ytmp, k5);
    for (int j = 0; j < k; ++j)
      ytmp[j] = y[j] + h * (A61 * k1[j] + A62 * k2[j] + A63 * k3[j] + A64 * k4[j] + A65 * k5[j]);
    sys(t + h, ytmp, k6);
    for (int j = 0; j < k; ++j)
      ynew[j] = y[j] + h * (B1 * k1[j] + B3 * k3[j] + B4 * k4[j] + B5 * k5[j] + B6 * k6[j]);
    sys(t + h, ynew, k7);
    for (int j = 0; j < k; ++j)
      yerr[j] = h * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j] + E7 * k7[j]);

    double scale = atol + rtol * std::max(max_norm(y, k), max_norm(ynew, k));
    double err = max_norm(yerr, k) / scale;

    if (!std::isfinite(err)) err = 1e10;
    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;
      ++trace.accepted_steps;
      record_if_sample(t);

      double nrm = max_norm(y, k);
      if (nrm > 0.0) {
        double lg = std::log(nrm);
        if (std::abs(lg) > 30.0) {
          double f = std::exp(-lg);
          for (int j = 0; j < k; ++j) {
            y[j] *= f;
            k1[j] *= f;  // RHS is linear in y
          }
          offset += lg;
          ++trace.renorm_count;
        }
      }
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h *= std::clamp(fac, 0.2, failed ? 1.0 : 5.0);
      failed = false;
    } else {
      ++trace.rejected_steps;
      if (h <= h_min * 1.0001) {
        trace.termination = TraceTermination::tolerance_failure;
        trace.terminal_radius = t;
        return trace;
      }
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      failed = true;
    }
  }

  trace.termination = TraceTermination::completed;
  trace.terminal_radius = t;
  return trace;
}

std::vector<double> FanSpec::angles() const {
  if (rays < 1) throw std::invalid_argument("FanSpec: need at least one ray");
  std::vector<double> out;
  for (int j = 0; j < rays; ++j) {
    double theta = kTwoPi * j / rays;
    // Wrap to (-pi, pi] for sector tests.
    double w = theta > std::numbers::pi ? theta - kTwoPi : theta;
    bool excluded = false;
    for (const auto& s : excluded_sectors) {
      double d = std::remainder(w - s.center, kTwoPi);
      if (std::abs(d) < s.half_width * (1.0 - 1e-12)) {
        excluded = true;
        break;
      }
    }
    if (!excluded) out.push_back(w);
  }
  if (out.empty()) throw std::invalid_argument("FanSpec: all rays excluded");
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SolutionHandle> solution_basis(const LinearODE& ode, const FanSpec& fan,
                                           const std::vector<double>& sample_radii,
                                           const IntegrationOptions& opts, int threads) {
  ode.validate();
  const int k = ode.order;
  std::vector<double> angles = fan.angles();

  std::vector<SolutionHandle> handles(k);
  for (int i = 0; i < k; ++i) {
    handles[i].ode = ode;
    handles[i].sample_radii = sample_radii;
    handles[i].initial_conditions.assign(k, ScaledComplex::zero());
    handles[i].initial_conditions[i] = ScaledComplex::from_complex(1.0);
    handles[i].traces.resize(angles.size());
  }

  struct Job {
    int handle;
    std::size_t ray;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < k; ++i)
    for (std::size_t r = 0; r < angles.size(); ++r) jobs.push_back({i, r});

  int nthreads = threads > 0 ? threads : int(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, int(jobs.size())));

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t idx = cursor.fetch_add(1);
      if (idx >= jobs.size()) return;
      const Job& job = jobs[idx];
      handles[job.handle].traces[job.ray] = integrate_ray(
          ode, handles[job.handle].initial_conditions, angles[job.ray], sample_radii, opts);
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return handles;
}

namespace {

std::optional<std::size_t> radius_index(const std::vector<double>& radii, double r) {
  auto it = std::lower_bound(radii.begin(), radii.end(), r * (1.0 - 1e-12));
  if (it == radii.end() || std::abs(*it - r) > 1e-9 * std::max(1.0, r)) return std::nullopt;
  return std::size_t(it - radii.begin());
}

}  // namespace

std::optional<SolutionHandle::LogM> SolutionHandle::solution_log_M(double r) const {
  auto idx = radius_index(sample_radii, r);
  if (!idx) return std::nullopt;
  double best = -std::numeric_limits<double>::infinity();
  int rays = 0;
  for (const auto& tr : traces) {
    if (tr.samples.size() <= *idx) continue;
    best = std::max(best, tr.samples[*idx].log_abs[0]);
    ++rays;
  }
  if (rays == 0) return std::nullopt;
  return LogM{best, rays};
}

double SolutionHandle::censor_radius() const {
  double c = std::numeric_limits<double>::infinity();
  for (const auto& tr : traces)
    if (tr.termination == TraceTermination::step_budget)
      c = std::min(c, tr.terminal_radius);
  return c;
}

std::optional<double> SolutionHandle::fan_proximity(double r) const {
  auto idx = radius_index(sample_radii, r);
  if (!idx) return std::nullopt;
  double acc = 0.0;
  int rays = 0;
  for (const auto& tr : traces) {
    if (tr.samples.size() <= *idx) continue;
    acc += std::max(0.0, tr.samples[*idx].log_abs[0]);
    ++rays;
  }
  if (rays == 0) return std::nullopt;
  return acc / rays;
}

const RayTrace* SolutionHandle::trace_at(double theta) const {
  for (const auto& tr : traces)
    if (std::abs(std::remainder(tr.theta - theta, kTwoPi)) < 1e-9) return &tr;
  return nullptr;
}

GrowthData handle_growth_data(const SolutionHandle& handle, bool budget_censoring) {
  GrowthData d;
  d.radii = handle.sample_radii;
  d.log_M.resize(d.radii.size());
  d.T.resize(d.radii.size());
  double censor = budget_censoring ? handle.censor_radius()
                                   : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.radii.size(); ++i) {
    if (d.radii[i] > censor) {
      ++d.censored_count;
      continue;
    }
    if (auto lm = handle.solution_log_M(d.radii[i])) d.log_M[i] = lm->log_M;
    if (auto t = handle.fan_proximity(d.radii[i])) d.T[i] = t;
  }
  return d;
}

namespace {

// Determinant of rows of ScaledComplex values with per-row scale factored
// out. A (near-)zero determinant is a legitimate value here: modified-row
// determinants vanish wherever the reconstructed coefficient does.
ScaledComplex split_determinant(std::vector<std::vector<ScaledComplex>> rows) {
  const std::size_t n = rows.size();
  double scale_sum = 0.0;
  std::vector<std::vector<cplx>> m(n, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) top = std::max(top, rows[i][j].log_abs());
    if (!std::isfinite(top)) return ScaledComplex::zero();  // all-zero row
    scale_sum += top;
    for (std::size_t j = 0; j < n; ++j) {
      double la = rows[i][j].log_abs();
      m[i][j] = rows[i][j].is_zero() ? cplx(0.0)
                                     : std::polar(std::exp(la - top), rows[i][j].arg());
    }
  }
  // LU with partial pivoting.
  cplx det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
    if (std::abs(m[piv][c]) == 0.0) return ScaledComplex::zero();
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      cplx f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return ScaledComplex::from_complex(det) * ScaledComplex::from_log_polar(scale_sum, 0.0);
}

// The basis Wronskian itself must stay away from zero relative to its row
// scales; below 1e-10 the point is treated as degenerate.
ScaledComplex checked_wronskian(std::vector<std::vector<ScaledComplex>> rows) {
  double scale_sum = 0.0;
  for (const auto& row : rows) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& v : row) top = std::max(top, v.log_abs());
    if (std::isfinite(top)) scale_sum += top;
  }
  ScaledComplex w = split_determinant(std::move(rows));
  if (w.is_zero() || w.log_abs() < scale_sum + std::log(1e-10))
    throw std::runtime_error(
        "wronskian: determinant below 1e-10 of its row scale (near-degenerate point)");
  return w;
}

struct TracedPoint {
  const SolutionHandle* handle;
  const RayTrace* trace;
  std::size_t sample;
};

std::vector<TracedPoint> locate(const std::vector<SolutionHandle>& handles, cplx z) {
  if (handles.empty()) throw std::invalid_argument("wronskian: empty basis");
  double r = std::abs(z);
  double theta = std::arg(z);
  std::vector<TracedPoint> pts;
  for (const auto& h : handles) {
    const RayTrace* tr = h.trace_at(theta);
    if (!tr) throw std::invalid_argument("wronskian: z is not on a traced ray");
    auto idx = radius_index(h.sample_radii, r);
    if (!idx || tr->samples.size() <= *idx)
      throw std::invalid_argument("wronskian: z is not a traced sample point");
    pts.push_back({&h, tr, *idx});
  }
  return pts;
}

}  // namespace

ScaledComplex wronskian_at(const std::vector<SolutionHandle>& handles, cplx z) {
  // At the base point the canonical samples are the initial data.
  const int k = int(handles.size());
  std::vector<std::vector<ScaledComplex>> rows(k, std::vector<ScaledComplex>(k));
  if (std::abs(z) == 0.0) {
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) rows[j][i] = handles[i].initial_conditions[j];
    return checked_wronskian(std::move(rows));
  }
  auto pts = locate(handles, z);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) rows[j][i] = pts[i].trace->value(pts[i].sample, j);
  return checked_wronskian(std::move(rows));
}

ScaledComplex reconstruct_coefficient(const std::vector<SolutionHandle>& handles, int s,
                                      cplx z) {
  const int k = int(handles.size());
  if (s < 1 || s > k) throw std::invalid_argument("reconstruct_coefficient: s must be in 1..k");
  auto pts = locate(handles, z);
  const LinearODE& ode = handles.front().ode;

  // k-th derivatives from the equation: f^(k) = -sum_j A_j f^(j).
  std::vector<ScaledComplex> top(k);
  std::vector<ScaledComplex> coeff_vals(k);
  for (int j = 0; j < k; ++j) coeff_vals[j] = ode.coefficient_at(j, z);
  for (int i = 0; i < k; ++i) {
    ScaledComplex acc;
    for (int j = 0; j < k; ++j) acc += coeff_vals[j] * pts[i].trace->value(pts[i].sample, j);
    top[i] = -acc;
  }

  const int replaced = k - s;
  std::vector<std::vector<ScaledComplex>> rows(k, std::vector<ScaledComplex>(k));
  std::vector<std::vector<ScaledComplex>> wrows(k, std::vector<ScaledComplex>(k));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      rows[j][i] = pts[i].trace->value(pts[i].sample, j);
      wrows[j][i] = (j == replaced) ? top[i] : rows[j][i];
    }
  ScaledComplex W = checked_wronskian(std::move(rows));
  ScaledComplex Ws = split_determinant(std::move(wrows));
  return -(Ws / W);
}

ScaledComplex wronskian_at(const std::vector<EntireFunction>& basis, cplx z) {
  const int k = int(basis.size());
  std::vector<std::vector<ScaledComplex>> rows(k, std::vector<ScaledComplex>(k));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) rows[j][i] = basis[i].derivative(j).eval(z);
  return checked_wronskian(std::move(rows));
}

double abel_consistency(const std::vector<SolutionHandle>& handles, double theta) {
  if (handles.empty()) throw std::invalid_argument("abel_consistency: empty basis");
  const SolutionHandle& h0 = handles.front();
  const RayTrace* tr = h0.trace_at(theta);
  if (!tr) throw std::invalid_argument("abel_consistency: no trace at theta");
  const EntireFunction& a_top = h0.ode.coefficients.back();
  cplx dir = std::polar(1.0, theta);

  // Adaptive-enough Simpson on [0, r]: fixed fine grid, doubled once for a
  // convergence estimate.
  auto integral_re = [&](double r) {
    auto simpson = [&](int n) {
      double acc = 0.0;
      double hstep = r / n;
      for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        cplx z = (hstep * i) * dir;
        acc += w * (a_top.eval_complex(z) * dir).real();
      }
      return acc * hstep / 3.0;
    };
    double c1 = simpson(512), c2 = simpson(1024);
    return std::abs(c2 - c1) < 1e-9 * std::max(1.0, std::abs(c2)) ? c2 : simpson(4096);
  };

  double w0 = wronskian_at(handles, cplx(0.0)).log_abs();
  double worst = 0.0;
  std::size_t nsmp = tr->samples.size();
  for (const auto& h : handles) {
    const RayTrace* t2 = h.trace_at(theta);
    nsmp = std::min(nsmp, t2 ? t2->samples.size() : 0);
  }
  for (std::size_t i = 0; i < nsmp; ++i) {
    double r = tr->samples[i].r;
    cplx z = std::polar(r, theta);
    double lw = wronskian_at(handles, z).log_abs();
    double predicted = w0 - integral_re(r);
    worst = std::max(worst, std::abs(lw - predicted) / std::max(1.0, std::abs(lw)));
  }
  return worst;
}

}  // namespace growthlab
