#include "qlnc/errors.hpp"
#include "qlnc/json_io.hpp"
#include "qlnc/xfer.hpp"

namespace qlnc {

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw LoadError(LoadError::Kind::schema, "schema error at '" + field + "': " + what);
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) schema_error(where, "expected a number");
  return v.get<double>();
}

CodingSolution solution_from_json(const Json& doc) {
  if (!doc.is_object()) schema_error("$", "expected an object");
  CodingSolution sol;
  if (auto a = doc.find("alpha"); a != doc.end()) {
    if (!a->is_object()) schema_error("$.alpha", "expected an object");
    for (auto it = a->begin(); it != a->end(); ++it) {
      const std::string& key = it.key();
      const auto arrow = key.find("->");
      if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= key.size())
        schema_error("$.alpha." + key, "key must have the form 'edge->edge'");
      sol.alpha[{key.substr(0, arrow), key.substr(arrow + 2)}] =
          number(it.value(), "$.alpha." + key);
    }
  }
  if (auto b = doc.find("beta"); b != doc.end()) {
    if (!b->is_object()) schema_error("$.beta", "expected an object");
    for (auto t = b->begin(); t != b->end(); ++t) {
      const std::string where = "$.beta." + t.key();
      if (!t.value().is_object()) schema_error(where, "expected an object");
      std::vector<std::map<std::string, double>> per_demand;
      for (auto d = t.value().begin(); d != t.value().end(); ++d) {
        const std::string& dk = d.key();
        std::size_t pos = 0;
        int j = 0;
        try {
          if (dk.rfind("demand_", 0) != 0) throw std::invalid_argument(dk);
          j = std::stoi(dk.substr(7), &pos);
          if (pos != dk.size() - 7) throw std::invalid_argument(dk);
        } catch (const std::exception&) {
          schema_error(where + "." + dk, "key must be demand_<n>");
        }
        if (j < 1) schema_error(where + "." + dk, "demand positions are 1-based");
        if (per_demand.size() < static_cast<std::size_t>(j)) per_demand.resize(j);
        if (!d.value().is_object()) schema_error(where + "." + dk, "expected an object");
        for (auto e = d.value().begin(); e != d.value().end(); ++e)
          per_demand[j - 1][e.key()] = number(e.value(), where + "." + dk + "." + e.key());
      }
      sol.beta[t.key()] = std::move(per_demand);
    }
  }
  return sol;
}

Json solution_to_json(const CodingSolution& sol, const GammaProfile& profile) {
  Json doc = Json::object();
  doc["alpha"] = Json::object();
  for (const auto& [key, value] : sol.alpha) doc["alpha"][key.first + "->" + key.second] = value;
  doc["beta"] = Json::object();
  for (const auto& [terminal, per_demand] : sol.beta) {
    Json t = Json::object();
    for (std::size_t j = 0; j < per_demand.size(); ++j) {
      Json d = Json::object();
      for (const auto& [edge, value] : per_demand[j]) d[edge] = value;
      t["demand_" + std::to_string(j + 1)] = d;
    }
    doc["beta"][terminal] = t;
  }
  doc["gamma_max"] = profile.gamma_max;
  doc["F"] = profile.F;
  return doc;
}

}  // namespace

CodingSolution solution_from_json_text(const std::string& text) {
  try {
    return solution_from_json(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw LoadError(LoadError::Kind::parse, e.what());
  }
}

CodingSolution load_solution(const std::string& path) {
  try {
    return solution_from_json(read_json_file(path));
  } catch (const LoadError& e) {
    if (e.kind() == LoadError::Kind::schema)
      throw LoadError(LoadError::Kind::schema, path + ": " + e.what());
    throw;
  }
}

std::string solution_to_json_text(const CodingSolution& sol, const GammaProfile& profile) {
  return dump_json(solution_to_json(sol, profile));
}

void save_solution(const CodingSolution& sol, const GammaProfile& profile, const std::string& path) {
  write_json_file(path, solution_to_json(sol, profile));
}

}  // namespace qlnc
