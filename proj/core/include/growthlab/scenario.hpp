#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "growthlab/config.hpp"
#include "growthlab/report.hpp"

namespace growthlab {

struct ScenarioSpec {
  std::string id;
  std::string kind;
  json payload;               // the full scenario object
  std::string expect = "pass";  // "pass" | "inapplicable"
};

/// Integrated bases keyed by their full configuration; lets scenarios that
/// share an ODE/grid/fan/integrator (e.g. the theorem-2 and theorem-3 checks
/// on the same equation) reuse one set of ray integrations.
class BasisCache {
 public:
  using Basis = std::vector<SolutionHandle>;
  std::shared_ptr<const Basis> get_or_compute(const std::string& key,
                                              const std::function<Basis()>& compute);

 private:
  std::map<std::string, std::shared_ptr<const Basis>> entries_;
};

struct RunContext {
  long seed = 0;
  int threads = 0;  // <= 0: hardware concurrency
  std::shared_ptr<BasisCache> cache = std::make_shared<BasisCache>();
};

/// Parse a suite document: {"schema": 1, "scenarios": [...]}.
std::vector<ScenarioSpec> parse_suite(const json& doc);

/// Execute one scenario. Configuration errors throw; numeric disagreement
/// yields verdict "fail"; unmet hypotheses yield "inapplicable".
Report run_scenario(const ScenarioSpec& spec, const RunContext& ctx);

struct SuiteResult {
  std::vector<Report> reports;
  bool all_ok = true;  // every scenario matched its expectation
  std::string summary_text;
};

SuiteResult run_suite(const std::vector<ScenarioSpec>& scenarios, const RunContext& ctx);

}  // namespace growthlab
