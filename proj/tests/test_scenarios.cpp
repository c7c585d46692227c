#include <doctest.h>

#include <cmath>

#include "growthlab/scenario.hpp"

using namespace growthlab;

namespace {

json id_triple_json() {
  return json{{"alpha", {{"name", "identity"}}},
              {"beta", {{"name", "identity"}}},
              {"gamma", {{"name", "identity"}}}};
}

ScenarioSpec make_spec(json payload) {
  ScenarioSpec spec;
  spec.id = payload.at("id").get<std::string>();
  spec.kind = payload.at("kind").get<std::string>();
  spec.expect = payload.value("expect", "pass");
  spec.payload = std::move(payload);
  return spec;
}

}  // namespace

TEST_CASE("suite parsing validates structure") {
  json good = {{"schema", 1},
               {"scenarios", json::array({{{"id", "a"}, {"kind", "zero_bound_property"}}})}};
  auto specs = parse_suite(good);
  REQUIRE(specs.size() == 1);
  CHECK(specs[0].expect == "pass");

  json bad_key = {{"schema", 1}, {"scenarioz", json::array()}};
  CHECK_THROWS_AS(parse_suite(bad_key), std::invalid_argument);

  json bad_expect = {{"schema", 1},
                     {"scenarios", json::array({{{"id", "a"},
                                                 {"kind", "zero_bound_property"},
                                                 {"expect", "maybe"}}})}};
  CHECK_THROWS_AS(parse_suite(bad_expect), std::invalid_argument);
}

TEST_CASE("unknown scenario keys are rejected") {
  RunContext ctx;
  ScenarioSpec spec = make_spec({{"id", "x"},
                                 {"kind", "zero_bound_property"},
                                 {"count", 5},
                                 {"max_degree", 4},
                                 {"coeff_range", 10.0},
                                 {"bogus_knob", 1}});
  CHECK_THROWS_AS(run_scenario(spec, ctx), std::invalid_argument);
}

TEST_CASE("zero bound scenario passes and records the seed") {
  RunContext ctx;
  ctx.seed = 99;
  Report rep = run_scenario(make_spec({{"id", "zb"},
                                       {"kind", "zero_bound_property"},
                                       {"count", 40},
                                       {"max_degree", 6},
                                       {"coeff_range", 10.0}}),
                            ctx);
  CHECK(rep.verdict == "pass");
  CHECK(rep.seed == 99);
  CHECK(rep.measured.at("polynomials_within_bound").get<int>() == 40);
}

TEST_CASE("interval measure scenario") {
  RunContext ctx;
  Report rep = run_scenario(make_spec({{"id", "im"},
                                       {"kind", "lemma_interval_measure"},
                                       {"j3", 2},
                                       {"N_values", {10, 1000}},
                                       {"tolerance", 1e-12}}),
                            ctx);
  CHECK(rep.verdict == "pass");
  double measured = rep.measured.at("partials")[0].at("measure").get<double>();
  CHECK(measured == doctest::Approx(std::log(5.5)).epsilon(1e-12));
}

TEST_CASE("wiman-valiron scenario: pass and inapplicable") {
  RunContext ctx;
  Report ok = run_scenario(make_spec({{"id", "wv"},
                                      {"kind", "lemma_wiman_valiron"},
                                      {"function", "exp(z)"},
                                      {"grid", {{"r0", 4.0}, {"ratio", 1.2}, {"count", 16}}},
                                      {"m_max", 2}}),
                           ctx);
  CHECK(ok.verdict == "pass");
  CHECK(ok.measured.at("fraction_within").get<double>() >= 0.9);

  Report poly = run_scenario(make_spec({{"id", "wvp"},
                                        {"kind", "lemma_wiman_valiron"},
                                        {"function", "z^3 + z"},
                                        {"m_max", 1}}),
                             ctx);
  CHECK(poly.verdict == "inapplicable");  // distinct from "fail"
}

TEST_CASE("prop_order_algebra scenario on the exponential pair") {
  RunContext ctx;
  Report rep = run_scenario(make_spec({{"id", "po"},
                                       {"kind", "prop_order_algebra"},
                                       {"f1", "exp(z)"},
                                       {"f2", "exp(z^2)"},
                                       {"sigma1", 1.0},
                                       {"sigma2", 2.0},
                                       {"triple", id_triple_json()},
                                       {"grid", {{"r0", 4.0}, {"ratio", 1.15}, {"count", 40}}},
                                       {"mode", "M_based"},
                                       {"check_reciprocal", true}}),
                            ctx);
  CHECK(rep.verdict == "pass");
  CHECK(rep.measured.at("sigma_sum").get<double>() == doctest::Approx(2.0).epsilon(0.05));
  CHECK(rep.measured.at("sigma_product").get<double>() == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("prop_type_algebra records the product-type hypothesis failure") {
  RunContext ctx;
  Report rep = run_scenario(
      make_spec({{"id", "pt"},
                 {"kind", "prop_type_algebra"},
                 {"f1", "exp(z)"},
                 {"f2", "exp(2*z)"},
                 {"sigma1", 1.0},
                 {"sigma2", 1.0},
                 {"tau1", 1.0},
                 {"tau2", 2.0},
                 {"sigma_sum", 1.0},
                 {"sigma_product", 1.0},
                 {"expect_tau_sum", 2.0},
                 {"expect_tau_product", 3.0},
                 {"triple", id_triple_json()},
                 {"grid", {{"r0", 4.0}, {"ratio", 1.15}, {"count", 40}}},
                 {"mode", "M_based"}}),
      ctx);
  CHECK(rep.verdict == "pass");
  CHECK(rep.measured.at("tau_sum").get<double>() == doctest::Approx(2.0).epsilon(0.1));
  CHECK(rep.measured.at("tau_product").get<double>() == doctest::Approx(3.0).epsilon(0.1));
  bool found_hypothesis_case = false;
  for (const auto& clause : rep.clauses)
    if (clause.at("status").get<std::string>().find("hypothesis not satisfied") !=
        std::string::npos)
      found_hypothesis_case = true;
  CHECK(found_hypothesis_case);
}

TEST_CASE("theorem1 on a degenerate constant-coefficient equation") {
  // f'' + f = 0: both sides of the theorem-1 equality are zero.
  RunContext ctx;
  ctx.threads = 2;
  Report rep = run_scenario(
      make_spec({{"id", "t1c"},
                 {"kind", "theorem1"},
                 {"ode", {{"order", 2}, {"coefficients", {"1", "0"}}}},
                 {"triple", id_triple_json()},
                 {"grid", {{"r0", 2.0}, {"ratio", 1.18}, {"count", 18}}},
                 {"fan", {{"rays", 16}}},
                 {"integrator", {{"tol", 1e-8}, {"step_budget", 500000}}},
                 {"tolerances", {{"order", 0.1}}}}),
      ctx);
  CHECK(rep.verdict == "pass");
  CHECK(rep.measured.at("sup_coefficient_order").get<double>() ==
        doctest::Approx(0.0).epsilon(1e-9));
  // Finite-radius slope of a log-growth chain decays like 1/log r; the
  // degenerate path accepts it with a note while it is still falling.
  CHECK(rep.measured.at("sup_handle_shifted_order").get<double>() <= 0.5);
  REQUIRE_FALSE(rep.notes.empty());
  CHECK(rep.notes.front().find("degenerate") != std::string::npos);
}

TEST_CASE("theorem3 is inapplicable without coefficient dominance") {
  // f'' + e^z f' + e^{2z} f = 0 has equal coefficient orders: theorem 3's
  // strict-dominance hypothesis fails (theorem 4 covers it instead).
  RunContext ctx;
  ctx.threads = 2;
  Report rep = run_scenario(
      make_spec({{"id", "t3na"},
                 {"kind", "theorem3"},
                 {"ode", {{"order", 2}, {"coefficients", {"exp(2*z)", "exp(z)"}}}},
                 {"triple", id_triple_json()},
                 {"grid", {{"r0", 2.0}, {"ratio", 1.2}, {"count", 16}}},
                 {"fan", {{"rays", 8}}},
                 {"integrator", {{"tol", 1e-6}, {"step_budget", 100000}}},
                 {"tolerances", {{"order", 0.15}}}}),
      ctx);
  CHECK(rep.verdict == "inapplicable");
}

TEST_CASE("theorem2 counts a genuinely low-order solution against m") {
  // f'' + e^z f' = 0 has the constant solution (shifted order 0) next to a
  // doubly exponential one; with lambda = 1 the coefficient e^z gives m = 1.
  RunContext ctx;
  ctx.threads = 2;
  Report rep = run_scenario(
      make_spec({{"id", "t2m1"},
                 {"kind", "theorem2"},
                 {"lambda", 1.0},
                 {"ode", {{"order", 2}, {"coefficients", {"0", "exp(z)"}}}},
                 {"triple", id_triple_json()},
                 {"grid", {{"r0", 1.0}, {"ratio", 1.17}, {"count", 16}}},
                 {"fan", {{"rays", 32}}},
                 {"integrator", {{"tol", 1e-6}, {"step_budget", 400000}}},
                 {"tolerances", {{"order", 0.15}}}}),
      ctx);
  CHECK(rep.verdict == "pass");
  CHECK(rep.measured.at("m").get<int>() == 1);
  CHECK(rep.measured.at("handles_below_lambda").get<int>() == 1);
}

TEST_CASE("theorem2 tie and empty-qualifier branches are inapplicable") {
  RunContext ctx;
  ctx.threads = 2;
  // sigma estimates: A_0 = exp(z^2) -> 2, A_1 = exp(z) -> 1. At lambda = 1.06
  // the index-1 coefficient sits in the dead band just below qualification,
  // which would change m: a tie.
  json base = {{"id", "t2tie"},
               {"kind", "theorem2"},
               {"lambda", 1.06},
               {"ode", {{"order", 2}, {"coefficients", {"exp(z^2)", "exp(z)"}}}},
               {"triple", id_triple_json()},
               {"grid", {{"r0", 0.5}, {"ratio", 1.15}, {"count", 12}}},
               {"fan", {{"rays", 8}}},
               {"integrator", {{"tol", 1e-6}, {"step_budget", 100000}}},
               {"tolerances", {{"order", 0.15}}}};
  Report tie = run_scenario(make_spec(base), ctx);
  CHECK(tie.verdict == "inapplicable");
  REQUIRE_FALSE(tie.notes.empty());
  CHECK(tie.notes.front().find("tie") != std::string::npos);

  // No coefficient reaches lambda = 2.5: m is undefined.
  base["id"] = "t2empty";
  base["lambda"] = 2.5;
  Report empty = run_scenario(make_spec(base), ctx);
  CHECK(empty.verdict == "inapplicable");
  REQUIRE_FALSE(empty.notes.empty());
  CHECK(empty.notes.front().find("no coefficient") != std::string::npos);
}

TEST_CASE("reports are deterministic for a fixed config and seed") {
  RunContext ctx1, ctx2;
  ctx1.seed = ctx2.seed = 7;
  json payload = {{"id", "zb"},
                  {"kind", "zero_bound_property"},
                  {"count", 30},
                  {"max_degree", 5},
                  {"coeff_range", 8.0}};
  Report a = run_scenario(make_spec(payload), ctx1);
  Report b = run_scenario(make_spec(payload), ctx2);
  CHECK(a.to_json(false).dump() == b.to_json(false).dump());
}

TEST_CASE("run_suite summarizes expectation mismatches") {
  RunContext ctx;
  std::vector<ScenarioSpec> specs;
  specs.push_back(make_spec({{"id", "good"},
                             {"kind", "lemma_interval_measure"},
                             {"j3", 2},
                             {"N_values", {10}},
                             {"tolerance", 1e-12}}));
  json wrong = {{"id", "mismatch"},
                {"kind", "lemma_interval_measure"},
                {"expect", "inapplicable"},
                {"j3", 2},
                {"N_values", {10}},
                {"tolerance", 1e-12}};
  specs.push_back(make_spec(wrong));
  SuiteResult res = run_suite(specs, ctx);
  CHECK_FALSE(res.all_ok);
  CHECK(res.summary_text.find("MISMATCH") != std::string::npos);
}
