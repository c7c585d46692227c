#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "growthlab/expression.hpp"
#include "growthlab/growth.hpp"
#include "growthlab/ode.hpp"
#include "growthlab/scales.hpp"

namespace growthlab {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Reject documents with keys outside the allowlist (typo guard; config
/// contract says unknown keys are errors).
void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& context);

/// {"name": "iter_log", "k": 1} | {"name": "power", "s": 0.5} |
/// {"name": "affine", "a": 2, "b": 0} | {"name": "identity"}; an optional
/// "c" overrides the quasi-additivity constant.
ScaleFunction parse_scale(const json& j);

/// {"alpha": {...}, "beta": {...}, "gamma": {...}, "p_max": 3}
ScaleTriple parse_triple(const json& j);

/// {"r0": 4, "ratio": 1.15, "count": 40, "window_fraction": 0.5}
RadialGrid parse_grid(const json& j);

/// {"rays": 64, "exclude_sectors": [{"center": 0, "half_width": 0.52}]}
FanSpec parse_fan(const json& j);

/// {"order": 2, "coefficients": ["exp(z)", "0"]}  (A_0 .. A_{k-1})
LinearODE parse_ode(const json& j);

/// {"tol": 1e-6, "step_budget": 10000000}
IntegrationOptions parse_integrator(const json& j);

GrowthMode parse_mode(const std::string& s);

}  // namespace growthlab
