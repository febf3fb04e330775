#include <algorithm>
#include <functional>
#include <tuple>

#include "rca/model.hpp"

namespace rca::model {

using logic::Formula;
using logic::FormulaRole;
using logic::PredicateClass;
using logic::Sort;
using logic::Term;
using logic::Variable;
using logic::Weight;

const std::set<std::string>& RedundancyClosure::partners(const std::string& component) const {
  static const std::set<std::string> none;
  auto it = partner_sets.find(component);
  return it == partner_sets.end() ? none : it->second;
}

RedundancyClosure compute_redundancy_closure(const InfrastructureModel& model) {
  // Union-find over the pairs; every group member is a partner of every other.
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> root = [&](const std::string& c) -> std::string {
    auto it = parent.find(c);
    if (it == parent.end() || it->second == c) return c;
    return it->second = root(it->second);
  };
  for (const auto& e : model.redundancy_pairs) {
    if (e.from == e.to) continue;
    parent.emplace(e.from, e.from);
    parent.emplace(e.to, e.to);
    auto a = root(e.from), b = root(e.to);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::string, std::set<std::string>> groups;
  for (const auto& [c, _] : parent) groups[root(c)].insert(c);

  RedundancyClosure closure;
  for (const auto& [_, members] : groups)
    for (const auto& c : members) {
      auto& set = closure.partner_sets[c];
      for (const auto& p : members)
        if (p != c) set.insert(p);
    }
  return closure;
}

std::vector<RiskCapability> effective_capabilities(const InfrastructureModel& model) {
  std::vector<RiskCapability> out = model.risk_capabilities;
  for (const auto& rule : model.type_risk_rules)
    for (const auto& m : model.type_memberships)
      if (m.type == rule.type) out.push_back({m.component, rule.risk, rule.weight, rule.where});
  std::stable_sort(out.begin(), out.end(), [](const RiskCapability& a, const RiskCapability& b) {
    return std::tie(a.component, a.risk) < std::tie(b.component, b.risk);
  });
  return out;
}

namespace {

Formula atom(const char* predicate, std::vector<Term> terms) { return Formula::atom(predicate, std::move(terms)); }

Term v(const char* name) { return Term::var(name); }
Term c(const std::string& name) { return Term::constant(name); }

Formula forall(std::vector<Variable> vars, Formula body) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = Formula::forall(*it, std::move(body));
  return body;
}

void hard(mln::MLNProgram& p, Formula f, std::string label) {
  p.formulas.push_back({std::move(f), Weight::hard(), std::move(label), FormulaRole::model, 0});
}

}  // namespace

mln::MLNProgram compile_to_mln(const InfrastructureModel& model) {
  if (auto report = validate_model(model); has_errors(report)) throw ValidationError(std::move(report));

  mln::MLNProgram p;
  auto& sig = p.signature;
  sig.declare({kSpecificallyDependsOn, {Sort::component, Sort::component}, PredicateClass::evidence});
  sig.declare({kGenericallyDependsOn, {Sort::component, Sort::component}, PredicateClass::evidence});
  sig.declare({kRedundancy, {Sort::component, Sort::component}, PredicateClass::evidence});
  sig.declare({kHasRisk, {Sort::component, Sort::risk}, PredicateClass::evidence});
  sig.declare({kUnavailable, {Sort::component}, PredicateClass::derived});
  sig.declare({kAffectedByRisk, {Sort::component, Sort::risk}, PredicateClass::hypothesis});
  for (const auto& t : model.types) sig.declare({t, {Sort::component}, PredicateClass::evidence});

  for (const auto& name : model.components) p.domain.push_back({name, Sort::component});
  for (const auto& name : model.risks) p.domain.push_back({name, Sort::risk});

  const Variable x{"x", Sort::component}, y{"y", Sort::component}, z{"z", Sort::component};
  const Variable r{"r", Sort::risk};

  hard(p,
       forall({x, y}, Formula::implies(Formula::conjoin({atom(kSpecificallyDependsOn, {v("x"), v("y")}),
                                                         atom(kUnavailable, {v("y")})}),
                                       atom(kUnavailable, {v("x")}))),
       "specific dependency");

  // y counts as down for x only if no redundant partner of y is up.
  Formula live_partner = Formula::exists(
      z, Formula::conjoin({atom(kRedundancy, {v("y"), v("z")}), Formula::negate(atom(kUnavailable, {v("z")}))}));
  hard(p,
       forall({x, y}, Formula::implies(Formula::conjoin({atom(kGenericallyDependsOn, {v("x"), v("y")}),
                                                         atom(kUnavailable, {v("y")}),
                                                         Formula::negate(live_partner)}),
                                       atom(kUnavailable, {v("x")}))),
       "generic dependency");

  hard(p,
       forall({x, r}, Formula::implies(atom(kAffectedByRisk, {v("x"), v("r")}), atom(kUnavailable, {v("x")}))),
       "risk effect");

  hard(p,
       forall({x, y}, Formula::negate(Formula::conjoin({atom(kSpecificallyDependsOn, {v("x"), v("y")}),
                                                        atom(kGenericallyDependsOn, {v("x"), v("y")})}))),
       "dependency exclusivity");

  hard(p,
       forall({x, r}, Formula::implies(atom(kAffectedByRisk, {v("x"), v("r")}), atom(kHasRisk, {v("x"), v("r")}))),
       "capability guard");

  for (const auto& rule : model.type_risk_rules) {
    Formula f = Formula::forall(
        x, Formula::implies(Formula::atom(rule.type, {v("x")}), atom(kAffectedByRisk, {v("x"), c(rule.risk)})));
    p.formulas.push_back(
        {std::move(f), Weight::soft(rule.weight), "risk " + rule.risk + " of type " + rule.type, FormulaRole::model, 0});
  }
  for (const auto& cap : model.risk_capabilities)
    p.formulas.push_back({atom(kAffectedByRisk, {c(cap.component), c(cap.risk)}), Weight::soft(cap.weight),
                          "risk " + cap.risk + " of " + cap.component, FormulaRole::model, 0});

  auto fact = [&](const char* predicate, std::vector<std::string> args) {
    p.evidence.insert({predicate, std::move(args)});
  };
  for (const auto& e : model.specific_deps) fact(kSpecificallyDependsOn, {e.from, e.to});
  for (const auto& e : model.generic_deps) fact(kGenericallyDependsOn, {e.from, e.to});
  for (const auto& [component, partners] : compute_redundancy_closure(model).partner_sets)
    for (const auto& partner : partners) fact(kRedundancy, {component, partner});
  for (const auto& cap : effective_capabilities(model)) fact(kHasRisk, {cap.component, cap.risk});
  for (const auto& m : model.type_memberships) p.evidence.insert({m.type, {m.component}});
  return p;
}

}  // namespace rca::model
