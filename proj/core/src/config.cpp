#include "growthlab/config.hpp"

#include <stdexcept>

namespace growthlab {

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& context) {
  if (!j.is_object()) throw std::invalid_argument(context + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw std::invalid_argument(context + ": unknown key '" + it.key() + "'");
  }
}

ScaleFunction parse_scale(const json& j) {
  if (j.is_string()) {
    // Shorthand: "identity", "iter_log:1", "power:0.5", "affine:2,0".
    std::string s = j.get<std::string>();
    auto colon = s.find(':');
    std::string name = s.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string::npos) {
      std::string rest = s.substr(colon + 1);
      std::size_t pos = 0;
      while (pos < rest.size()) {
        std::size_t comma = rest.find(',', pos);
        params.push_back(std::stod(rest.substr(pos, comma - pos)));
        pos = comma == std::string::npos ? rest.size() : comma + 1;
      }
    }
    return builtin_scale(name, params);
  }
  require_keys(j, {"name", "k", "s", "a", "b", "c"}, "scale");
  std::string name = j.at("name").get<std::string>();
  std::vector<double> params;
  if (name == "iter_log") params.push_back(j.at("k").get<double>());
  if (name == "power") params.push_back(j.at("s").get<double>());
  if (name == "affine") {
    params.push_back(j.at("a").get<double>());
    if (j.contains("b")) params.push_back(j.at("b").get<double>());
  }
  ScaleFunction f = builtin_scale(name, params);
  if (j.contains("c")) f.set_quasi_additive_c(j.at("c").get<double>());
  return f;
}

ScaleTriple parse_triple(const json& j) {
  require_keys(j, {"alpha", "beta", "gamma", "p_max"}, "triple");
  ScaleTriple t{parse_scale(j.at("alpha")), parse_scale(j.at("beta")),
                parse_scale(j.at("gamma"))};
  if (j.contains("p_max")) t.p_max = j.at("p_max").get<int>();
  return t;
}

RadialGrid parse_grid(const json& j) {
  require_keys(j, {"r0", "ratio", "count", "window_fraction"}, "grid");
  RadialGrid g;
  if (j.contains("r0")) g.r0 = j.at("r0").get<double>();
  if (j.contains("ratio")) g.ratio = j.at("ratio").get<double>();
  if (j.contains("count")) g.count = j.at("count").get<int>();
  if (j.contains("window_fraction")) g.window_fraction = j.at("window_fraction").get<double>();
  if (!(g.window_fraction > 0.0 && g.window_fraction <= 1.0))
    throw std::invalid_argument("grid: window_fraction must lie in (0, 1]");
  return g;
}

FanSpec parse_fan(const json& j) {
  require_keys(j, {"rays", "exclude_sectors"}, "fan");
  FanSpec f;
  if (j.contains("rays")) f.rays = j.at("rays").get<int>();
  if (j.contains("exclude_sectors")) {
    for (const auto& s : j.at("exclude_sectors")) {
      require_keys(s, {"center", "half_width"}, "fan.exclude_sectors");
      f.excluded_sectors.push_back({s.at("center").get<double>(),
                                    s.at("half_width").get<double>()});
    }
  }
  return f;
}

LinearODE parse_ode(const json& j) {
  require_keys(j, {"order", "coefficients"}, "ode");
  LinearODE ode;
  ode.order = j.at("order").get<int>();
  for (const auto& c : j.at("coefficients"))
    ode.coefficients.push_back(parse_function(c.get<std::string>()));
  ode.validate();
  return ode;
}

IntegrationOptions parse_integrator(const json& j) {
  require_keys(j, {"tol", "step_budget"}, "integrator");
  IntegrationOptions o;
  if (j.contains("tol")) o.tol = j.at("tol").get<double>();
  if (j.contains("step_budget")) o.step_budget = j.at("step_budget").get<long>();
  return o;
}

GrowthMode parse_mode(const std::string& s) {
  if (s == "T_based" || s == "T") return GrowthMode::T_based;
  if (s == "M_based" || s == "M") return GrowthMode::M_based;
  throw std::invalid_argument("mode: expected T_based or M_based, got '" + s + "'");
}

}  // namespace growthlab
