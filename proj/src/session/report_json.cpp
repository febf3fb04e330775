#include "rca/serialize.hpp"

namespace rca::session {

json to_json(const Observation& o) {
  return {{"component", o.component},
          {"status", to_string(o.status)},
          {"source", to_string(o.source)},
          {"timestamp", o.timestamp_ms}};
}

Observation observation_from_json(const json& doc) {
  if (!doc.is_object()) throw Error("observation must be an object");
  auto text = [&](const char* key) -> std::string {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) throw Error(std::string("observation needs a string '") + key + "'");
    return it->get<std::string>();
  };
  Observation o;
  o.component = text("component");
  o.status = parse_status(text("status"));
  if (doc.contains("source")) o.source = parse_source(text("source"));
  if (auto it = doc.find("timestamp"); it != doc.end()) {
    if (!it->is_number_integer()) throw Error("observation timestamp must be an integer");
    o.timestamp_ms = it->get<std::int64_t>();
  }
  return o;
}

json to_json(const Cause& c) { return {{"component", c.component}, {"risk", c.risk}}; }

namespace {

json causes(const std::vector<Cause>& list) {
  json out = json::array();
  for (const auto& c : list) out.push_back(to_json(c));
  return out;
}

}  // namespace

json to_json(const RootCauseReport& r) {
  json alternatives = json::array(), explanations = json::array();
  for (const auto& a : r.alternatives) alternatives.push_back({{"causes", causes(a.causes)}, {"score", a.score}});
  for (const auto& e : r.explanations)
    explanations.push_back({{"cause", to_json(e.cause)}, {"target", e.target}, {"path", e.path}, {"derived", true}});
  return {{"causes", causes(r.causes)},
          {"derivedUnavailable", r.derived_unavailable},
          {"derivedAvailable", r.derived_available},
          {"score", r.score},
          {"alternatives", alternatives},
          {"explanations", explanations}};
}

json to_json(const ObservationConflict& c) {
  json earlier = to_json(c.earlier());
  earlier["index"] = c.earlier_index();
  return {{"error", "conflict"}, {"message", c.what()}, {"earlier", earlier}, {"later", to_json(c.later())}};
}

json to_json(const Contradiction& c) {
  json obs = json::array();
  for (std::size_t i = 0; i < c.observations().size(); ++i) {
    json o = to_json(c.observations()[i]);
    o["index"] = c.indices()[i];
    obs.push_back(o);
  }
  return {{"error", "contradiction"}, {"message", c.what()}, {"observations", obs}};
}

}  // namespace rca::session
