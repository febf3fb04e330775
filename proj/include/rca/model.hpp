#pragma once

// Infrastructure model: components, dependencies, redundancy and risks.
// Parsed from a line-oriented DSL (or a JSON document), validated, and
// compiled into an MLN program.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rca/mln.hpp"

namespace rca::model {

inline constexpr const char* kSpecificallyDependsOn = "specificallyDependsOn";
inline constexpr const char* kGenericallyDependsOn = "genericallyDependsOn";
inline constexpr const char* kRedundancy = "redundancy";
inline constexpr const char* kHasRisk = "hasRisk";
inline constexpr const char* kUnavailable = "unavailable";
inline constexpr const char* kAffectedByRisk = "affectedByRisk";

struct SourceLocation {
  std::size_t line = 0;  ///< 1-based; 0 when not parsed from text
  std::size_t column = 0;
};

struct Edge {
  std::string from;
  std::string to;
  SourceLocation where;
};

struct RiskCapability {
  std::string component;
  std::string risk;
  double weight = 0.0;
  SourceLocation where;
};

struct TypeMembership {
  std::string component;
  std::string type;
  SourceLocation where;
};

struct TypeRiskRule {
  std::string type;
  std::string risk;
  double weight = 0.0;
  SourceLocation where;
};

/// Names are kept in declaration order.
struct InfrastructureModel {
  std::vector<std::string> components;
  std::vector<std::string> risks;
  std::vector<std::string> types;
  std::vector<Edge> specific_deps;  ///< from depends on to
  std::vector<Edge> generic_deps;
  std::vector<Edge> redundancy_pairs;
  std::vector<RiskCapability> risk_capabilities;
  std::vector<TypeMembership> type_memberships;
  std::vector<TypeRiskRule> type_risk_rules;

  bool has_component(std::string_view name) const;
  bool has_risk(std::string_view name) const;
  bool has_type(std::string_view name) const;
};

struct Diagnostic {
  SourceLocation where;
  std::string message;
};

class ParseError : public Error {
 public:
  ParseError(std::string source, std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// One declaration per line, `#` starts a comment:
///   component <name>            risk <name>            type <name>
///   dependsSpecific <from> <to> dependsGeneric <from> <to>
///   redundant <a> <b>           instanceOf <component> <type>
///   hasRisk <component> <risk> weight <float>
///   typeRisk <type> <risk> weight <float>
/// Declarations may appear in any order. All problems are collected and
/// thrown together as a ParseError.
InfrastructureModel parse_model(std::string_view text, std::string source = "<model>");
InfrastructureModel load_model_file(const std::string& path);

/// DSL text that parses back to an equal model (locations aside).
std::string to_dsl(const InfrastructureModel& model);

struct ObservedStatus {
  std::string component;
  bool available = false;
  SourceLocation where;
};

/// `observe available <component>` / `observe unavailable <component>`.
std::vector<ObservedStatus> parse_observations(std::string_view text, std::string source = "<observations>");
std::vector<ObservedStatus> load_observation_file(const std::string& path);

enum class Severity { error, warning };

struct ValidationIssue {
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  std::vector<std::string> names;
};

using ValidationReport = std::vector<ValidationIssue>;

/// Checks: undeclared names, a pair in both dependency kinds, dependency
/// cycles (with the cycle path), self-redundancy, non-finite weights, type
/// names that clash with built-in predicates. Non-negative risk weights are
/// reported as warnings.
ValidationReport validate_model(const InfrastructureModel& model);
bool has_errors(const ValidationReport& report);

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Symmetric, transitive, irreflexive closure of the redundancy pairs.
struct RedundancyClosure {
  std::map<std::string, std::set<std::string>> partner_sets;

  const std::set<std::string>& partners(const std::string& component) const;
};

RedundancyClosure compute_redundancy_closure(const InfrastructureModel& model);

/// Risk capabilities after expanding type rules onto members, in
/// (component, risk) order. A pair declared several times keeps every weight.
std::vector<RiskCapability> effective_capabilities(const InfrastructureModel& model);

/// The deductive program: hard dependency, redundancy and risk-effect rules,
/// the dependency exclusivity constraint, the capability guard, and one soft
/// formula per risk capability or type rule. Throws ValidationError if the
/// model has errors.
mln::MLNProgram compile_to_mln(const InfrastructureModel& model);

}  // namespace rca::model
