#pragma once

#include <string>

#include "json.hpp"
#include "streamks/reference.hpp"

namespace streamks {

/// {"kind": "...", "params": {...}} with kinds
///   uniform-unit
///   piecewise-linear-cdf  params.knots = [[x, F], ...]
///   discrete-pmf-lifted   params.atoms = [[value, weight], ...]
///   wedge-perturbed       params.base = <model>, params.eps, params.center
/// Throws UnsupportedModel for an unknown kind, DomainError for bad params.
Model model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const Model& model);

/// Accepts inline JSON, a bare kind name such as "uniform-unit", or
/// "wedge:EPS:CENTER" (a wedge over the uniform model).
Model parse_model_spec(const std::string& spec);

}  // namespace streamks
