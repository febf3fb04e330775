#pragma once

// JSON documents shared by the CLI, the server and the Python module.

#include <json.hpp>

#include "rca/model.hpp"
#include "rca/session.hpp"

namespace rca {

using json = nlohmann::json;

namespace model {

/// {"components": [...], "risks": [...], "types": [...],
///  "dependsSpecific" / "dependsGeneric" / "redundant": [{"from", "to"}],
///  "hasRisk": [{"component", "risk", "weight"}],
///  "instanceOf": [{"component", "type"}],
///  "typeRisk": [{"type", "risk", "weight"}]}
/// Missing arrays are empty. Shape errors throw rca::Error naming the path;
/// name checks are left to validate_model.
InfrastructureModel model_from_json(const json& doc);
json model_to_json(const InfrastructureModel& model);

/// Nodes and edges for a graph view: {"nodes": [{"id", "risks", "types"}],
/// "edges": [{"from", "to", "kind"}]} with kind specific|generic|redundancy.
json graph_to_json(const InfrastructureModel& model);

json validation_to_json(const ValidationReport& report);

}  // namespace model

namespace session {

json to_json(const Observation& observation);
/// Accepts {"component", "status", "source"?, "timestamp"?}.
Observation observation_from_json(const json& doc);

json to_json(const Cause& cause);

/// Keys: causes, derivedUnavailable, derivedAvailable, score, alternatives,
/// explanations. Explanations carry "derived": true since they come from the
/// dependency graph rather than from inference.
json to_json(const RootCauseReport& report);

json to_json(const ObservationConflict& conflict);
json to_json(const Contradiction& contradiction);

}  // namespace session

}  // namespace rca
