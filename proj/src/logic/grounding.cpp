#include <unordered_map>

#include "rca/logic.hpp"

namespace rca::logic {

namespace {

using K = Formula::Kind;

struct Scope {
  std::map<std::string, Sort> variables;
};

void check_sorts(const Formula& f, const Signature& sig,
                 const std::unordered_map<std::string, Sort>& constants, Scope& scope) {
  switch (f.kind()) {
    case K::truth: return;
    case K::atom: {
      const auto& decl = sig.at(f.predicate());
      if (decl.arity() != f.terms().size())
        throw SortError("predicate '" + decl.name + "' expects " + std::to_string(decl.arity()) +
                        " arguments in " + f.to_string());
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        const auto& t = f.terms()[i];
        Sort actual;
        if (t.is_variable) {
          auto it = scope.variables.find(t.name);
          if (it == scope.variables.end()) throw UnboundVariable(t.name);
          actual = it->second;
        } else {
          auto it = constants.find(t.name);
          if (it == constants.end())
            throw SortError("constant '" + t.name + "' is not in the domain (" + f.to_string() + ")");
          actual = it->second;
        }
        if (actual != decl.arg_sorts[i])
          throw SortError("argument " + std::to_string(i + 1) + " of " + f.to_string() + " must be a " +
                          to_string(decl.arg_sorts[i]));
      }
      return;
    }
    case K::forall:
    case K::exists: {
      const auto& v = f.variable();
      auto saved = scope.variables.find(v.name) != scope.variables.end()
                       ? std::optional<Sort>(scope.variables[v.name])
                       : std::nullopt;
      scope.variables[v.name] = v.sort;
      check_sorts(f.children()[0], sig, constants, scope);
      if (saved)
        scope.variables[v.name] = *saved;
      else
        scope.variables.erase(v.name);
      return;
    }
    default:
      for (const auto& c : f.children()) check_sorts(c, sig, constants, scope);
  }
}

class Grounder {
 public:
  Grounder(const Signature& sig, const Domain& domain, const Evidence& evidence)
      : sig_(sig), evidence_(evidence) {
    for (const auto& c : domain) by_sort_[c.sort].push_back(c.name);
  }

  const std::vector<std::string>& constants(Sort sort) const {
    static const std::vector<std::string> none;
    auto it = by_sort_.find(sort);
    return it == by_sort_.end() ? none : it->second;
  }

  Formula eval(const Formula& f, Binding& env) const {
    switch (f.kind()) {
      case K::truth: return f;
      case K::atom: {
        GroundAtomKey key{f.predicate(), {}};
        key.args.reserve(f.terms().size());
        for (const auto& t : f.terms()) {
          if (t.is_variable) {
            auto it = env.find(t.name);
            if (it == env.end()) throw UnboundVariable(t.name);
            key.args.push_back(it->second);
          } else {
            key.args.push_back(t.name);
          }
        }
        if (sig_.at(key.predicate).cls == PredicateClass::evidence)
          return Formula::truth(evidence_.count(key) > 0);
        std::vector<Term> terms;
        terms.reserve(key.args.size());
        for (auto& a : key.args) terms.push_back(Term::constant(std::move(a)));
        return Formula::atom(std::move(key.predicate), std::move(terms));
      }
      case K::negation: return simplify(Formula::negate(eval(f.children()[0], env)));
      case K::conjunction:
      case K::disjunction: {
        const bool is_and = f.kind() == K::conjunction;
        std::vector<Formula> parts;
        for (const auto& c : f.children()) {
          auto g = eval(c, env);
          if (g.kind() == K::truth) {
            if (g.truth_value() != is_and) return g;
            continue;
          }
          parts.push_back(std::move(g));
        }
        return junction(is_and, std::move(parts));
      }
      case K::implication: {
        auto a = eval(f.children()[0], env);
        if (a.is_truth(false)) return Formula::top();
        auto c = eval(f.children()[1], env);
        return simplify(Formula::implies(std::move(a), std::move(c)));
      }
      case K::forall:
      case K::exists: {
        const bool is_and = f.kind() == K::forall;
        const auto& var = f.variable();
        std::optional<std::string> saved;
        if (auto it = env.find(var.name); it != env.end()) saved = it->second;
        std::vector<Formula> parts;
        std::optional<Formula> absorbed;
        for (const auto& name : constants(var.sort)) {
          env[var.name] = name;
          auto g = eval(f.children()[0], env);
          if (g.kind() == K::truth) {
            if (g.truth_value() != is_and) {
              absorbed = g;
              break;
            }
            continue;
          }
          parts.push_back(std::move(g));
        }
        if (saved)
          env[var.name] = *saved;
        else
          env.erase(var.name);
        if (absorbed) return *absorbed;
        return junction(is_and, std::move(parts));
      }
    }
    return f;
  }

 private:
  static Formula junction(bool is_and, std::vector<Formula> parts) {
    auto f = is_and ? Formula::conjoin(std::move(parts)) : Formula::disjoin(std::move(parts));
    return simplify(f);
  }

  const Signature& sig_;
  const Evidence& evidence_;
  std::map<Sort, std::vector<std::string>> by_sort_;
};

}  // namespace

std::vector<GroundFormula> ground_formula(const WeightedFormula& wf, const Signature& signature,
                                          const Domain& domain, const Evidence& evidence,
                                          std::size_t source) {
  std::unordered_map<std::string, Sort> constants;
  for (const auto& c : domain) {
    if (c.name.empty()) throw Error("constant names must not be empty");
    if (!constants.emplace(c.name, c.sort).second)
      throw Error("constant '" + c.name + "' appears twice in the domain");
  }
  for (const auto& atom : evidence) {
    const auto& decl = signature.at(atom.predicate);
    if (decl.cls != PredicateClass::evidence)
      throw Error("evidence atom " + atom.to_string() + " is not over a closed-world predicate");
  }
  Scope scope;
  check_sorts(wf.formula, signature, constants, scope);

  // Leading universal quantifiers define the groundings; each one is a
  // separate feature of the ground network.
  std::vector<Variable> prefix;
  Formula body = wf.formula;
  while (body.kind() == K::forall) {
    prefix.push_back(body.variable());
    body = body.children()[0];
  }

  Grounder grounder(signature, domain, evidence);
  std::vector<GroundFormula> out;
  Binding env;

  auto emit = [&]() {
    Formula g = grounder.eval(body, env);
    if (g.kind() == K::truth) {
      const bool value = g.truth_value();
      if ((wf.weight.kind() == Weight::Kind::hard && !value) ||
          (wf.weight.kind() == Weight::Kind::hard_false && value))
        throw EvidenceContradiction(wf.label.empty() ? wf.formula.to_string() : wf.label,
                                    to_string(env));
      return;
    }
    out.push_back(GroundFormula{std::move(g), wf.weight, source, env});
  };

  std::vector<const std::vector<std::string>*> ranges;
  for (const auto& v : prefix) {
    ranges.push_back(&grounder.constants(v.sort));
    if (ranges.back()->empty()) return out;
  }
  std::vector<std::size_t> odometer(prefix.size(), 0);
  while (true) {
    env.clear();
    for (std::size_t i = 0; i < prefix.size(); ++i) env[prefix[i].name] = (*ranges[i])[odometer[i]];
    emit();
    std::size_t i = prefix.size();
    while (i > 0) {
      --i;
      if (++odometer[i] < ranges[i]->size()) break;
      odometer[i] = 0;
      if (i == 0) return out;
    }
    if (prefix.empty()) return out;
  }
}

}  // namespace rca::logic
