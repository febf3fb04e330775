#include <cmath>

#include "rca/serialize.hpp"

namespace rca::model {

namespace {

const json& field(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(path + ": missing '" + key + "'");
  return *it;
}

std::string string_at(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_string()) throw Error(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

double weight_at(const json& obj, const std::string& path) {
  const auto& v = field(obj, "weight", path);
  if (!v.is_number()) throw Error(path + ".weight: expected a number");
  double w = v.get<double>();
  if (!std::isfinite(w)) throw Error(path + ".weight: must be finite");
  return w;
}

template <typename Each>
void each_entry(const json& doc, const char* key, Each&& each) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  if (!it->is_array()) throw Error(std::string(key) + ": expected an array");
  for (std::size_t i = 0; i < it->size(); ++i) each((*it)[i], std::string(key) + "[" + std::to_string(i) + "]");
}

json edges(const std::vector<Edge>& list) {
  json out = json::array();
  for (const auto& e : list) out.push_back({{"from", e.from}, {"to", e.to}});
  return out;
}

}  // namespace

InfrastructureModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw Error("model document must be an object");
  InfrastructureModel m;
  auto names = [&](const char* key, std::vector<std::string>& out) {
    each_entry(doc, key, [&](const json& v, const std::string& path) {
      if (!v.is_string()) throw Error(path + ": expected a string");
      out.push_back(v.get<std::string>());
    });
  };
  names("components", m.components);
  names("risks", m.risks);
  names("types", m.types);
  auto edge_list = [&](const char* key, std::vector<Edge>& out) {
    each_entry(doc, key, [&](const json& v, const std::string& path) {
      if (!v.is_object()) throw Error(path + ": expected an object");
      out.push_back({string_at(v, "from", path), string_at(v, "to", path), {}});
    });
  };
  edge_list("dependsSpecific", m.specific_deps);
  edge_list("dependsGeneric", m.generic_deps);
  edge_list("redundant", m.redundancy_pairs);
  each_entry(doc, "hasRisk", [&](const json& v, const std::string& path) {
    if (!v.is_object()) throw Error(path + ": expected an object");
    m.risk_capabilities.push_back({string_at(v, "component", path), string_at(v, "risk", path), weight_at(v, path), {}});
  });
  each_entry(doc, "instanceOf", [&](const json& v, const std::string& path) {
    if (!v.is_object()) throw Error(path + ": expected an object");
    m.type_memberships.push_back({string_at(v, "component", path), string_at(v, "type", path), {}});
  });
  each_entry(doc, "typeRisk", [&](const json& v, const std::string& path) {
    if (!v.is_object()) throw Error(path + ": expected an object");
    m.type_risk_rules.push_back({string_at(v, "type", path), string_at(v, "risk", path), weight_at(v, path), {}});
  });
  return m;
}

json model_to_json(const InfrastructureModel& m) {
  json caps = json::array(), members = json::array(), rules = json::array();
  for (const auto& c : m.risk_capabilities) caps.push_back({{"component", c.component}, {"risk", c.risk}, {"weight", c.weight}});
  for (const auto& t : m.type_memberships) members.push_back({{"component", t.component}, {"type", t.type}});
  for (const auto& r : m.type_risk_rules) rules.push_back({{"type", r.type}, {"risk", r.risk}, {"weight", r.weight}});
  return {{"components", m.components},
          {"risks", m.risks},
          {"types", m.types},
          {"dependsSpecific", edges(m.specific_deps)},
          {"dependsGeneric", edges(m.generic_deps)},
          {"redundant", edges(m.redundancy_pairs)},
          {"hasRisk", caps},
          {"instanceOf", members},
          {"typeRisk", rules}};
}

json graph_to_json(const InfrastructureModel& m) {
  auto caps = effective_capabilities(m);
  json nodes = json::array();
  for (const auto& c : m.components) {
    json risks = json::array(), types = json::array();
    for (const auto& cap : caps)
      if (cap.component == c) risks.push_back({{"risk", cap.risk}, {"weight", cap.weight}});
    for (const auto& t : m.type_memberships)
      if (t.component == c) types.push_back(t.type);
    nodes.push_back({{"id", c}, {"risks", risks}, {"types", types}});
  }
  json out_edges = json::array();
  auto add = [&](const std::vector<Edge>& list, const char* kind) {
    for (const auto& e : list) out_edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", kind}});
  };
  add(m.specific_deps, "specific");
  add(m.generic_deps, "generic");
  add(m.redundancy_pairs, "redundancy");
  return {{"nodes", nodes}, {"edges", out_edges}};
}

json validation_to_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& i : report)
    out.push_back({{"severity", i.severity == Severity::error ? "error" : "warning"},
                   {"code", i.code},
                   {"message", i.message},
                   {"names", i.names}});
  return out;
}

}  // namespace rca::model
