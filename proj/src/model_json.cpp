#include "streamks/model_json.hpp"

#include <sstream>

#include "streamks/errors.hpp"

namespace streamks {

using nlohmann::json;

Model model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw DomainError("model description needs a \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  const json params = j.value("params", json::object());
  try {
    if (kind == "uniform-unit") return Model::uniform_unit();
    if (kind == "piecewise-linear-cdf") {
      std::vector<Knot> knots;
      for (const auto& k : params.at("knots")) knots.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
      return Model::piecewise_linear(std::move(knots));
    }
    if (kind == "discrete-pmf-lifted") {
      std::vector<Atom> atoms;
      for (const auto& a : params.at("atoms")) atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
      return Model::discrete_lifted(std::move(atoms));
    }
    if (kind == "wedge-perturbed") {
      const Model base = params.contains("base") ? model_from_json(params.at("base")) : Model::uniform_unit();
      return wedge_perturb(base, params.at("eps").get<double>(), params.value("center", 0.5));
    }
  } catch (const json::exception& e) {
    throw DomainError("bad parameters for model kind \"" + kind + "\": " + e.what());
  }
  throw UnsupportedModel("unknown model kind \"" + kind + "\"");
}

json model_to_json(const Model& model) {
  json j;
  j["kind"] = std::string(to_string(model.kind()));
  switch (model.kind()) {
    case ModelKind::kUniformUnit:
      break;
    case ModelKind::kPiecewiseLinearCdf: {
      json knots = json::array();
      for (const Knot& k : model.knots()) knots.push_back({k.x, k.cdf});
      j["params"]["knots"] = knots;
      break;
    }
    case ModelKind::kDiscretePmfLifted: {
      json atoms = json::array();
      for (const Atom& a : model.atoms()) atoms.push_back({a.value, a.weight});
      j["params"]["atoms"] = atoms;
      break;
    }
    case ModelKind::kWedgePerturbed:
      j["params"]["base"] = model_to_json(*model.wedge_base());
      j["params"]["eps"] = model.wedge_eps();
      j["params"]["center"] = model.wedge_center();
      break;
  }
  return j;
}

Model parse_model_spec(const std::string& spec) {
  const auto first = spec.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && spec[first] == '{') {
    json j;
    try {
      j = json::parse(spec);
    } catch (const json::parse_error& e) {
      throw DomainError(std::string("model spec is not valid JSON: ") + e.what());
    }
    return model_from_json(j);
  }
  if (spec.rfind("wedge:", 0) == 0) {
    std::istringstream in(spec.substr(6));
    double eps = 0.0;
    double center = 0.5;
    char sep = 0;
    if (!(in >> eps)) throw DomainError("wedge spec is wedge:EPS[:CENTER]");
    if (in >> sep) {
      if (sep != ':' || !(in >> center)) throw DomainError("wedge spec is wedge:EPS[:CENTER]");
    }
    return wedge_perturb(Model::uniform_unit(), eps, center);
  }
  return model_from_json(json{{"kind", spec}});
}

}  // namespace streamks
