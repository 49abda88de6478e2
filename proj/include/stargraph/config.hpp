#pragma once

#include <string>

#include <json.hpp>

#include "stargraph/experiments.hpp"

namespace stargraph {

/// Edge-function descriptor:
///   {"type": "zero"}
///   {"type": "constant", "value": v, "support_end": 1.0}
///   {"type": "piecewise_constant", "knots": [...], "values": [...]}
///   {"type": "polynomial", "coeffs": [...], "lo": 0.0, "hi": 1.0}
///   {"type": "tabulated", "tau": [...], "value": [...]}
EdgeFunction edge_function_from_json(const nlohmann::json& j);

/// Sweep description. "kappa"/"U"/"V" take a single descriptor (broadcast) or
/// an array of n descriptors; "zetas" is a list of [re, im] pairs; "mesh" is
/// optional and overrides individual MeshPolicy fields.
SweepSpec sweep_from_json(const nlohmann::json& j);

SweepSpec load_sweep(const std::string& path);

nlohmann::json report_to_json(const ConvergenceReport& report);

}  // namespace stargraph
