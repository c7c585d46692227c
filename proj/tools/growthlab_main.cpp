// growthlab: growth indicators of entire functions and growth verification
// for solutions of linear ODEs with entire coefficients.
//
// Subcommands: indicators, verify, reduce, scales-check, trace.
// Exit codes: 0 success, 1 verification/assertion failure, 2 usage/config
// error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "growthlab/config.hpp"
#include "growthlab/nevanlinna.hpp"
#include "growthlab/reduction.hpp"
#include "growthlab/report.hpp"
#include "growthlab/scenario.hpp"

namespace gl = growthlab;
using gl::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitUsage = 2;

json parse_json_arg(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(what + ": " + e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

gl::ScaleTriple triple_from_args(const std::string& alpha, const std::string& beta,
                                 const std::string& gamma) {
  auto one = [](const std::string& s) {
    if (!s.empty() && s.front() == '{') return gl::parse_scale(json::parse(s));
    return gl::parse_scale(json(s));
  };
  return {one(alpha), one(beta), one(gamma)};
}

gl::RadialGrid grid_from_csv(const std::string& csv) {
  gl::RadialGrid g;
  if (csv.empty()) return g;
  double r0, q;
  int count;
  if (std::sscanf(csv.c_str(), "%lf,%lf,%d", &r0, &q, &count) != 3)
    throw std::invalid_argument("--grid expects r0,ratio,count");
  g.r0 = r0;
  g.ratio = q;
  g.count = count;
  return g;
}

int cmd_indicators(const std::string& fn_text, const std::string& alpha,
                   const std::string& beta, const std::string& gamma,
                   const std::string& grid_csv, const std::string& out_dir, long seed) {
  gl::EntireFunction f = gl::parse_function(fn_text);
  gl::ScaleTriple triple = triple_from_args(alpha, beta, gamma);
  gl::RadialGrid grid = grid_from_csv(grid_csv);

  gl::GrowthData dm = gl::sample_growth_for(f, grid, gl::GrowthMode::M_based);
  gl::GrowthData dt = gl::sample_growth_for(f, grid, gl::GrowthMode::T_based);
  gl::IndicatorEstimate om = gl::estimate_order(dm, triple, gl::GrowthMode::M_based, false, grid);
  gl::IndicatorEstimate ot = gl::estimate_order(dt, triple, gl::GrowthMode::T_based, false, grid);
  double sigma = om.degenerate ? 0.0 : om.value_slope;

  std::printf("function: %s\n", fn_text.c_str());
  std::printf("order (M-based)  slope=%.6f  tail_sup=%.6f\n", om.value_slope, om.value_tail_sup);
  std::printf("order (T-based)  slope=%.6f  tail_sup=%.6f\n", ot.value_slope, ot.value_tail_sup);
  if (sigma > 0.0) {
    gl::IndicatorEstimate tm =
        gl::estimate_type(dm, triple, sigma, gl::GrowthMode::M_based, false, grid);
    std::printf("type tau_M at sigma=%.4f: intercept=%.6f  tail_sup=%.6f\n", sigma,
                tm.value_slope, tm.value_tail_sup);
  } else {
    std::printf("type: skipped (estimated order is zero)\n");
  }

  std::filesystem::create_directories(out_dir);
  std::vector<std::vector<double>> rows;
  for (const auto& s : om.samples) {
    double T = std::numeric_limits<double>::quiet_NaN();
    double logM = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < dm.radii.size(); ++i)
      if (std::abs(dm.radii[i] - s.r) <= 1e-12 * s.r) {
        if (dm.log_M[i]) logM = *dm.log_M[i];
        if (dt.T[i]) T = *dt.T[i];
      }
    rows.push_back({s.r, logM, T, s.numerator, s.denominator, s.ratio});
  }
  gl::write_file_atomic(out_dir + "/indicators.csv",
                        gl::make_csv({"r", "log_M", "T", "numerator", "denominator", "ratio"}, rows));
  std::printf("samples: %s/indicators.csv (seed %ld)\n", out_dir.c_str(), seed);
  return kExitOk;
}

struct VerifyOverrides {
  std::string grid_csv;  // r0,ratio,count
  int fan_rays = 0;
  double tol = 0.0;
};

// Overrides replace fields a scenario already declares; scenarios without
// the field (e.g. gridless property checks) are left alone.
void apply_overrides(std::vector<gl::ScenarioSpec>& scenarios, const VerifyOverrides& ov) {
  for (auto& s : scenarios) {
    if (!ov.grid_csv.empty() && s.payload.contains("grid")) {
      gl::RadialGrid g = grid_from_csv(ov.grid_csv);
      s.payload["grid"]["r0"] = g.r0;
      s.payload["grid"]["ratio"] = g.ratio;
      s.payload["grid"]["count"] = g.count;
    }
    if (ov.fan_rays > 0 && s.payload.contains("fan")) s.payload["fan"]["rays"] = ov.fan_rays;
    if (ov.tol > 0.0 && s.payload.contains("integrator"))
      s.payload["integrator"]["tol"] = ov.tol;
  }
}

int cmd_verify(const std::string& suite_path, const std::string& out_dir, long seed,
               int threads, const VerifyOverrides& overrides) {
  json doc = load_json_file(suite_path);
  std::vector<gl::ScenarioSpec> scenarios = gl::parse_suite(doc);
  if (scenarios.empty()) {
    std::printf("warning: suite is empty\n");
    return kExitOk;
  }
  apply_overrides(scenarios, overrides);
  gl::RunContext ctx;
  ctx.seed = seed;
  ctx.threads = threads;
  gl::SuiteResult result = gl::run_suite(scenarios, ctx);
  std::filesystem::create_directories(out_dir);
  for (const auto& rep : result.reports) gl::write_report(rep, out_dir);
  gl::write_file_atomic(out_dir + "/summary.txt", result.summary_text);
  std::fputs(result.summary_text.c_str(), stdout);
  std::printf("reports: %s (seed %ld)\n", out_dir.c_str(), seed);
  return result.all_ok ? kExitOk : kExitVerificationFailed;
}

int cmd_reduce(const std::string& ode_text, const std::string& f1_text,
               const std::string& out_dir) {
  gl::LinearODE ode = gl::parse_ode(parse_json_arg(ode_text, "--ode"));
  auto f1 = std::make_shared<gl::EntirePointwise>(gl::parse_function(f1_text));

  gl::ReducedODE red;
  try {
    red = gl::reduce_order(ode, f1);
  } catch (const std::invalid_argument& e) {
    // Non-solution input: report the residual evidence and fail.
    std::printf("reduce: %s\n", e.what());
    return kExitVerificationFailed;
  }

  std::vector<std::complex<double>> points;
  for (double r : {0.5, 1.0, 1.5, 2.0, 2.5})
    for (double th : {0.0, 1.0471975511965976, 2.0943951023931953})
      points.emplace_back(std::polar(r, th));

  std::printf("reduced order: %d\n", red.order);
  for (const auto& z : points) {
    std::printf("z=(%8.4f,%8.4f)  ", z.real(), z.imag());
    for (int j = 0; j < red.order; ++j) {
      auto v = red.coefficient_at(j, z).to_complex();
      std::printf("A_%d=(%.9g,%.9g) ", j, v.real(), v.imag());
    }
    std::printf("\n");
  }
  (void)out_dir;
  return kExitOk;
}

int cmd_scales_check(const std::string& scale_text, const std::string& cls,
                     const std::string& grid_csv) {
  gl::ScaleFunction scale = scale_text.front() == '{'
                                ? gl::parse_scale(json::parse(scale_text))
                                : gl::parse_scale(json(scale_text));
  double lo = std::max(scale.threshold_R0(), 1.0), hi = 1e8;
  int ppd = 64;
  if (!grid_csv.empty()) {
    if (std::sscanf(grid_csv.c_str(), "%lf,%lf,%d", &lo, &hi, &ppd) != 3)
      throw std::invalid_argument("--grid expects lo,hi,points_per_decade");
  }
  gl::ScaleClass c;
  if (cls == "L1")
    c = gl::ScaleClass::L1;
  else if (cls == "L2")
    c = gl::ScaleClass::L2;
  else if (cls == "L3")
    c = gl::ScaleClass::L3;
  else
    throw std::invalid_argument("--class must be L1, L2 or L3");
  gl::ClassReport rep = gl::check_class(scale, c, gl::geometric_grid(lo, hi, ppd));
  std::printf("scale %s vs %s on %s\n", rep.scale_id.c_str(), rep.class_tested.c_str(),
              rep.grid_description.c_str());
  std::printf("worst violation: %.6g (tolerance %.3g)\n", rep.worst_violation, rep.tolerance);
  if (!rep.witness.empty()) {
    std::printf("witness:");
    for (double w : rep.witness) std::printf(" %.6g", w);
    std::printf("\n");
  }
  for (const auto& n : rep.notes) std::printf("note: %s\n", n.c_str());
  std::printf("verdict: %s\n", rep.pass ? "pass" : "fail");
  return rep.pass ? kExitOk : kExitVerificationFailed;
}

int cmd_trace(const std::string& ode_text, int rays, const std::string& grid_csv, double tol,
              long budget, const std::string& out_dir) {
  gl::LinearODE ode = gl::parse_ode(parse_json_arg(ode_text, "--ode"));
  gl::RadialGrid grid = grid_from_csv(grid_csv);
  gl::FanSpec fan;
  fan.rays = rays;
  gl::IntegrationOptions opts;
  opts.tol = tol;
  opts.step_budget = budget;
  auto basis = gl::solution_basis(ode, fan, grid.radii(), opts);

  std::filesystem::create_directories(out_dir);
  for (std::size_t h = 0; h < basis.size(); ++h) {
    std::ostringstream os;
    os << "theta,r";
    for (int j = 0; j < ode.order; ++j) os << ",log_abs_f" << j;
    for (int j = 0; j < ode.order; ++j) os << ",arg_f" << j;
    os << ",renorm_count\n";
    char buf[64];
    for (const auto& tr : basis[h].traces) {
      for (const auto& s : tr.samples) {
        std::snprintf(buf, sizeof buf, "%.17g", tr.theta);
        os << buf;
        std::snprintf(buf, sizeof buf, ",%.17g", s.r);
        os << buf;
        for (int j = 0; j < ode.order; ++j) {
          std::snprintf(buf, sizeof buf, ",%.17g", s.log_abs[j]);
          os << buf;
        }
        for (int j = 0; j < ode.order; ++j) {
          std::snprintf(buf, sizeof buf, ",%.17g", s.arg[j]);
          os << buf;
        }
        os << "," << tr.renorm_count << "\n";
      }
    }
    gl::write_file_atomic(out_dir + "/trace_handle" + std::to_string(h) + ".csv", os.str());
  }
  std::printf("traces written to %s\n", out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growthlab: generalized growth indicators and ODE solution growth"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  long seed = 20240817;
  int threads = 0;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized property suites");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* ind = app.add_subcommand("indicators", "estimate (alpha,beta,gamma)-order and type");
  std::string fn_text, alpha = "identity", beta = "identity", gamma = "identity";
  std::string grid_csv;
  ind->add_option("--function", fn_text, "expression, e.g. \"exp(z^2)\"")->required();
  ind->add_option("--alpha", alpha, "scale: name[:params] or JSON");
  ind->add_option("--beta", beta, "scale");
  ind->add_option("--gamma", gamma, "scale");
  ind->add_option("--grid", grid_csv, "r0,ratio,count");

  auto* ver = app.add_subcommand("verify", "run a scenario suite");
  std::string suite_path;
  VerifyOverrides overrides;
  ver->add_option("suite", suite_path, "suite JSON file")->required();
  ver->add_option("--grid", overrides.grid_csv, "override scenario grids: r0,ratio,count");
  ver->add_option("--fan", overrides.fan_rays, "override fan ray counts");
  ver->add_option("--tol", overrides.tol, "override integrator tolerances");

  auto* red = app.add_subcommand("reduce", "order reduction by a known solution");
  std::string ode_text, f1_text;
  red->add_option("--ode", ode_text, "ODE JSON: {\"order\":k,\"coefficients\":[...]}")->required();
  red->add_option("--f1", f1_text, "known solution expression")->required();

  auto* sch = app.add_subcommand("scales-check", "class membership report for a scale");
  std::string scale_text, class_text = "L3", sgrid;
  sch->add_option("--scale", scale_text, "scale: name[:params] or JSON")->required();
  sch->add_option("--class", class_text, "L1 | L2 | L3");
  sch->add_option("--grid", sgrid, "lo,hi,points_per_decade");

  auto* trc = app.add_subcommand("trace", "integrate a ray fan and dump CSV traces");
  std::string tode;
  int trays = 16;
  std::string tgrid = "2,1.2,12";
  double ttol = 1e-9;
  long tbudget = 1000000;
  trc->add_option("--ode", tode, "ODE JSON")->required();
  trc->add_option("--fan", trays, "number of rays");
  trc->add_option("--grid", tgrid, "r0,ratio,count");
  trc->add_option("--tol", ttol, "integrator tolerance");
  trc->add_option("--budget", tbudget, "step budget per ray");

  for (auto* sub : {ind, ver, red, sch, trc}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;  // --help exits 0
  }

  try {
    if (*ind) return cmd_indicators(fn_text, alpha, beta, gamma, grid_csv, out_dir, seed);
    if (*ver) return cmd_verify(suite_path, out_dir, seed, threads, overrides);
    if (*red) return cmd_reduce(ode_text, f1_text, out_dir);
    if (*sch) return cmd_scales_check(scale_text, class_text, sgrid);
    if (*trc) return cmd_trace(tode, trays, tgrid, ttol, tbudget, out_dir);
  } catch (const gl::ExprParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerificationFailed;
  }
  return kExitUsage;
}
