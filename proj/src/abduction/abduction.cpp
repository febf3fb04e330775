#include <cmath>
#include <algorithm>
#include <map>

#include "rca/abduction.hpp"

namespace rca::abduction {

using logic::Formula;
using logic::FormulaRole;
using logic::PredicateClass;
using logic::Term;
using logic::Variable;
using logic::Weight;
using K = Formula::Kind;

namespace {

struct Rule {
  std::vector<Variable> prefix;
  Formula antecedent;
  std::vector<std::string> head_vars;
};

std::optional<Rule> as_rule(const mln::MLNProgram& program, const logic::WeightedFormula& wf,
                            std::string& head) {
  if (wf.role != FormulaRole::model || wf.weight.kind() != Weight::Kind::hard) return std::nullopt;
  Rule rule{{}, Formula::top(), {}};
  Formula body = wf.formula;
  while (body.kind() == K::forall) {
    rule.prefix.push_back(body.variable());
    body = body.children()[0];
  }
  if (body.kind() != K::implication) return std::nullopt;
  const Formula& consequent = body.children()[1];
  if (consequent.kind() != K::atom) return std::nullopt;
  const auto* decl = program.signature.find(consequent.predicate());
  if (!decl || decl->cls != PredicateClass::derived) return std::nullopt;

  for (const auto& t : consequent.terms()) {
    bool bound = std::any_of(rule.prefix.begin(), rule.prefix.end(),
                             [&](const Variable& v) { return v.name == t.name; });
    bool repeated = std::find(rule.head_vars.begin(), rule.head_vars.end(), t.name) != rule.head_vars.end();
    if (!t.is_variable || !bound || repeated)
      throw Error("cannot reverse '" + (wf.label.empty() ? wf.formula.to_string() : wf.label) +
                  "': consequent arguments must be distinct universally quantified variables");
    rule.head_vars.push_back(t.name);
  }
  rule.antecedent = body.children()[0];
  head = consequent.predicate();
  return rule;
}

}  // namespace

mln::MLNProgram add_reverse_implications(const mln::MLNProgram& program, const AbductionConfig& config) {
  for (const auto& name : config.cause_predicates) {
    const auto* decl = program.signature.find(name);
    if (!decl) throw Error("cause predicate '" + name + "' is not declared");
    if (decl->cls != PredicateClass::hypothesis)
      throw Error("cause predicate '" + name + "' is not a hypothesis predicate");
  }
  if (config.reverse_implication_weight && !std::isfinite(*config.reverse_implication_weight))
    throw Error("reverse implication weight must be finite");

  std::vector<std::string> heads;
  std::map<std::string, std::vector<Rule>> rules;
  for (const auto& wf : program.formulas) {
    std::string head;
    if (auto rule = as_rule(program, wf, head)) {
      if (!rules.count(head)) heads.push_back(head);
      rules[head].push_back(std::move(*rule));
    }
  }
  if (heads.empty()) throw Error("program has no hard implications with a derived consequent to reverse");

  mln::MLNProgram out = program;
  for (const auto& head : heads) {
    const auto& decl = program.signature.at(head);
    std::vector<Variable> head_vars;
    std::vector<Term> head_terms;
    for (std::size_t i = 0; i < decl.arity(); ++i) {
      head_vars.push_back({"$h" + std::to_string(i), decl.arg_sorts[i]});
      head_terms.push_back(Term::var(head_vars.back().name));
    }

    std::vector<Formula> disjuncts;
    for (const auto& rule : rules[head]) {
      Formula d = rule.antecedent;
      for (std::size_t i = 0; i < rule.head_vars.size(); ++i)
        d = logic::rename_variable(d, rule.head_vars[i], head_vars[i].name);
      auto free = logic::free_variables(d);
      for (auto it = rule.prefix.rbegin(); it != rule.prefix.rend(); ++it) {
        if (std::find(rule.head_vars.begin(), rule.head_vars.end(), it->name) != rule.head_vars.end()) continue;
        if (!free.count(it->name)) continue;
        d = Formula::exists(*it, d);
      }
      disjuncts.push_back(std::move(d));
    }

    Formula reverse = Formula::implies(Formula::atom(head, head_terms), Formula::disjoin(std::move(disjuncts)));
    for (auto it = head_vars.rbegin(); it != head_vars.rend(); ++it) reverse = Formula::forall(*it, reverse);

    logic::WeightedFormula wf{std::move(reverse),
                              config.reverse_implication_weight ? Weight::soft(*config.reverse_implication_weight)
                                                                : Weight::hard(),
                              "reverse implication for " + head, FormulaRole::reverse_implication, 0};
    out.formulas.push_back(std::move(wf));
  }
  return out;
}

std::vector<logic::GroundClause> pc_mutex_clauses(std::span<const logic::AtomId> heads, double weight,
                                                  std::uint32_t origin) {
  for (std::size_t i = 0; i < heads.size(); ++i)
    for (std::size_t j = i + 1; j < heads.size(); ++j)
      if (heads[i] == heads[j]) throw Error("mutual exclusivity heads must be distinct");

  std::vector<logic::GroundClause> out;
  out.reserve(heads.size() * (heads.size() + 1) / 2);
  for (std::size_t i = 0; i < heads.size(); ++i) {
    out.push_back({{logic::Literal{heads[i], true}}, Weight::soft(weight), origin});
    for (std::size_t j = i + 1; j < heads.size(); ++j) {
      std::vector<logic::Literal> lits{{heads[i], false}, {heads[j], false}};
      logic::normalize_clause(lits);
      out.push_back({std::move(lits), Weight::soft(-weight), origin});
    }
  }
  return out;
}

void add_mutual_exclusivity(mln::GroundNetwork& network, const AbductionConfig& config) {
  if (!config.mutual_exclusivity_weight) return;
  std::map<std::uint32_t, std::vector<logic::AtomId>> heads;
  for (const auto& c : network.hard_clauses) {
    if (c.origin >= network.origins.size() ||
        network.origins[c.origin].role != FormulaRole::reverse_implication)
      continue;
    auto& list = heads[c.origin];
    for (const auto& l : c.literals) {
      const auto& atom = network.atoms[l.atom];
      if (!atom.auxiliary && config.cause_predicates.count(atom.key.predicate)) list.push_back(l.atom);
    }
  }
  for (auto& [origin, list] : heads) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (auto& c : pc_mutex_clauses(list, *config.mutual_exclusivity_weight, origin))
      network.soft_clauses.push_back(std::move(c));
  }
}

mln::GroundNetwork build_abductive_network(const mln::MLNProgram& program, const AbductionConfig& config) {
  auto network = mln::build_ground_network(program);
  add_mutual_exclusivity(network, config);
  return network;
}

std::vector<PreconditionIssue> check_abduction_preconditions(const mln::MLNProgram& program) {
  std::vector<PreconditionIssue> issues;
  for (std::size_t i = 0; i < program.formulas.size(); ++i) {
    const auto& wf = program.formulas[i];
    if (!wf.weight.is_soft() || wf.role == FormulaRole::reverse_implication) continue;
    if (wf.weight.value() >= 0.0)
      issues.push_back({i, wf.label.empty() ? wf.formula.to_string() : wf.label, wf.weight.value()});
  }
  return issues;
}

}  // namespace rca::abduction
