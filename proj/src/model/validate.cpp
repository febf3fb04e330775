#include <algorithm>
#include <cmath>
#include <functional>

#include "rca/model.hpp"

namespace rca::model {

namespace {

void add(ValidationReport& report, Severity severity, std::string code, std::string message,
         std::vector<std::string> names) {
  report.push_back({severity, std::move(code), std::move(message), std::move(names)});
}

std::string join(const std::vector<std::string>& names, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += sep;
    s += names[i];
  }
  return s;
}

void check_dangling(const InfrastructureModel& m, ValidationReport& report) {
  auto missing = [&](const std::string& name, const char* kind, bool ok) {
    if (!ok)
      add(report, Severity::error, "undeclared-name", std::string("undeclared ") + kind + " '" + name + "'",
          {name});
  };
  for (const auto* list : {&m.specific_deps, &m.generic_deps, &m.redundancy_pairs})
    for (const auto& e : *list) {
      missing(e.from, "component", m.has_component(e.from));
      missing(e.to, "component", m.has_component(e.to));
    }
  for (const auto& c : m.risk_capabilities) {
    missing(c.component, "component", m.has_component(c.component));
    missing(c.risk, "risk", m.has_risk(c.risk));
  }
  for (const auto& t : m.type_memberships) {
    missing(t.component, "component", m.has_component(t.component));
    missing(t.type, "type", m.has_type(t.type));
  }
  for (const auto& r : m.type_risk_rules) {
    missing(r.type, "type", m.has_type(r.type));
    missing(r.risk, "risk", m.has_risk(r.risk));
  }
}

void check_names(const InfrastructureModel& m, ValidationReport& report) {
  std::map<std::string, int> seen;
  for (const auto* list : {&m.components, &m.risks, &m.types})
    for (const auto& n : *list) {
      if (n.empty()) add(report, Severity::error, "empty-name", "names must not be empty", {n});
      if (++seen[n] == 2) add(report, Severity::error, "duplicate-name", "'" + n + "' is declared twice", {n});
    }
  static const std::set<std::string> builtin{kSpecificallyDependsOn, kGenericallyDependsOn, kRedundancy,
                                             kHasRisk, kUnavailable, kAffectedByRisk};
  for (const auto& t : m.types)
    if (builtin.count(t))
      add(report, Severity::error, "reserved-name", "type '" + t + "' clashes with a built-in predicate", {t});
}

void check_cycles(const InfrastructureModel& m, ValidationReport& report) {
  // A generic dependency on y also depends on every redundant partner of y.
  std::map<std::string, std::vector<std::string>> out;
  const auto closure = compute_redundancy_closure(m);
  for (const auto& e : m.specific_deps) out[e.from].push_back(e.to);
  for (const auto& e : m.generic_deps) {
    out[e.from].push_back(e.to);
    for (const auto& p : closure.partners(e.to))
      if (std::find(out[e.from].begin(), out[e.from].end(), p) == out[e.from].end()) out[e.from].push_back(p);
  }

  enum class Mark { white, grey, black };
  std::map<std::string, Mark> mark;
  std::vector<std::string> stack;
  std::set<std::set<std::string>> reported;

  std::function<void(const std::string&)> visit = [&](const std::string& node) {
    mark[node] = Mark::grey;
    stack.push_back(node);
    for (const auto& next : out[node]) {
      auto state = mark[next];
      if (state == Mark::grey) {
        auto start = std::find(stack.begin(), stack.end(), next);
        std::vector<std::string> path(start, stack.end());
        std::set<std::string> members(path.begin(), path.end());
        path.push_back(next);
        if (reported.insert(members).second)
          add(report, Severity::error, "dependency-cycle", "dependency cycle " + join(path, " -> "), path);
      } else if (state == Mark::white) {
        visit(next);
      }
    }
    stack.pop_back();
    mark[node] = Mark::black;
  };
  for (const auto& c : m.components)
    if (mark[c] == Mark::white) visit(c);
}

}  // namespace

ValidationReport validate_model(const InfrastructureModel& m) {
  ValidationReport report;
  check_names(m, report);
  check_dangling(m, report);

  std::set<std::pair<std::string, std::string>> specific;
  for (const auto& e : m.specific_deps) specific.emplace(e.from, e.to);
  for (const auto& e : m.generic_deps)
    if (specific.count({e.from, e.to}))
      add(report, Severity::error, "exclusive-dependency",
          "'" + e.from + "' depends on '" + e.to + "' both specifically and generically", {e.from, e.to});

  for (const auto& e : m.redundancy_pairs)
    if (e.from == e.to)
      add(report, Severity::error, "self-redundancy", "'" + e.from + "' is declared redundant with itself",
          {e.from});

  check_cycles(m, report);

  for (const auto& c : m.risk_capabilities) {
    if (!std::isfinite(c.weight))
      add(report, Severity::error, "non-finite-weight",
          "risk '" + c.risk + "' on '" + c.component + "' has a non-finite weight", {c.component, c.risk});
    else if (c.weight >= 0.0)
      add(report, Severity::warning, "non-negative-weight",
          "risk '" + c.risk + "' on '" + c.component +
              "' has a non-negative weight; mutual exclusivity clauses are then needed",
          {c.component, c.risk});
  }
  for (const auto& r : m.type_risk_rules) {
    if (!std::isfinite(r.weight))
      add(report, Severity::error, "non-finite-weight",
          "risk '" + r.risk + "' on type '" + r.type + "' has a non-finite weight", {r.type, r.risk});
    else if (r.weight >= 0.0)
      add(report, Severity::warning, "non-negative-weight",
          "risk '" + r.risk + "' on type '" + r.type +
              "' has a non-negative weight; mutual exclusivity clauses are then needed",
          {r.type, r.risk});
  }
  return report;
}

bool has_errors(const ValidationReport& report) {
  return std::any_of(report.begin(), report.end(),
                     [](const ValidationIssue& i) { return i.severity == Severity::error; });
}

ValidationError::ValidationError(ValidationReport report)
    : Error([&] {
        std::string msg = "invalid model";
        for (const auto& i : report)
          if (i.severity == Severity::error) msg += "\n  " + i.message;
        return msg;
      }()),
      report_(std::move(report)) {}

}  // namespace rca::model
