#include <cassert>
#include <cmath>
#include <sstream>

#include "rca/logic.hpp"

namespace rca::logic {

const char* to_string(Sort sort) {
  switch (sort) {
    case Sort::component: return "component";
    case Sort::risk: return "risk";
    case Sort::type_tag: return "type";
  }
  return "?";
}

void Signature::declare(PredicateDecl decl) {
  if (decl.name.empty()) throw Error("predicate name must not be empty");
  auto name = decl.name;
  if (!decls_.emplace(name, std::move(decl)).second)
    throw Error("predicate '" + name + "' declared twice");
}

const PredicateDecl* Signature::find(const std::string& name) const {
  auto it = decls_.find(name);
  return it == decls_.end() ? nullptr : &it->second;
}

const PredicateDecl& Signature::at(const std::string& name) const {
  if (auto* decl = find(name)) return *decl;
  throw Error("undeclared predicate '" + name + "'");
}

std::vector<const PredicateDecl*> Signature::predicates() const {
  std::vector<const PredicateDecl*> out;
  for (const auto& [_, decl] : decls_) out.push_back(&decl);
  return out;
}

struct Formula::Node {
  Kind kind = Kind::truth;
  bool value = false;
  std::string predicate;
  std::vector<Term> terms;
  std::vector<Formula> children;
  Variable variable;
};

Formula Formula::top() { return truth(true); }
Formula Formula::bottom() { return truth(false); }

Formula Formula::truth(bool value) {
  static const Formula t(std::make_shared<const Node>(Node{Kind::truth, true, {}, {}, {}, {}}));
  static const Formula f(std::make_shared<const Node>(Node{Kind::truth, false, {}, {}, {}, {}}));
  return value ? t : f;
}

Formula Formula::atom(std::string predicate, std::vector<Term> terms) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::atom, false, std::move(predicate), std::move(terms), {}, {}}));
}

Formula Formula::negate(Formula f) {
  return Formula(std::make_shared<const Node>(Node{Kind::negation, false, {}, {}, {std::move(f)}, {}}));
}

Formula Formula::conjoin(std::vector<Formula> parts) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::conjunction, false, {}, {}, std::move(parts), {}}));
}

Formula Formula::disjoin(std::vector<Formula> parts) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::disjunction, false, {}, {}, std::move(parts), {}}));
}

Formula Formula::implies(Formula antecedent, Formula consequent) {
  return Formula(std::make_shared<const Node>(Node{
      Kind::implication, false, {}, {}, {std::move(antecedent), std::move(consequent)}, {}}));
}

Formula Formula::forall(Variable var, Formula body) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::forall, false, {}, {}, {std::move(body)}, std::move(var)}));
}

Formula Formula::exists(Variable var, Formula body) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::exists, false, {}, {}, {std::move(body)}, std::move(var)}));
}

Formula::Kind Formula::kind() const { return node_->kind; }
bool Formula::is_truth(bool value) const { return node_->kind == Kind::truth && node_->value == value; }
bool Formula::truth_value() const {
  assert(node_->kind == Kind::truth);
  return node_->value;
}
const std::string& Formula::predicate() const { return node_->predicate; }
const std::vector<Term>& Formula::terms() const { return node_->terms; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
const Variable& Formula::variable() const { return node_->variable; }

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::truth: return a.value == b.value;
    case Kind::atom: return a.predicate == b.predicate && a.terms == b.terms;
    case Kind::forall:
    case Kind::exists:
      if (a.variable.name != b.variable.name || a.variable.sort != b.variable.sort) return false;
      break;
    default: break;
  }
  return a.children == b.children;
}

namespace {

void print(std::ostream& os, const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::truth: os << (f.truth_value() ? "true" : "false"); return;
    case K::atom: {
      os << f.predicate() << '(';
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        if (i) os << ',';
        os << f.terms()[i].name;
      }
      os << ')';
      return;
    }
    case K::negation:
      os << '!';
      print(os, f.children()[0]);
      return;
    case K::conjunction:
    case K::disjunction: {
      const char* op = f.kind() == K::conjunction ? " & " : " | ";
      if (f.children().empty()) {
        os << (f.kind() == K::conjunction ? "true" : "false");
        return;
      }
      os << '(';
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) os << op;
        print(os, f.children()[i]);
      }
      os << ')';
      return;
    }
    case K::implication:
      os << '(';
      print(os, f.children()[0]);
      os << " => ";
      print(os, f.children()[1]);
      os << ')';
      return;
    case K::forall:
    case K::exists:
      os << (f.kind() == K::forall ? "forall " : "exists ") << f.variable().name << ':'
         << to_string(f.variable().sort) << ' ';
      print(os, f.children()[0]);
      return;
  }
}

Formula rebuild(const Formula& f, std::vector<Formula> children) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::negation: return Formula::negate(std::move(children[0]));
    case K::conjunction: return Formula::conjoin(std::move(children));
    case K::disjunction: return Formula::disjoin(std::move(children));
    case K::implication: return Formula::implies(std::move(children[0]), std::move(children[1]));
    case K::forall: return Formula::forall(f.variable(), std::move(children[0]));
    case K::exists: return Formula::exists(f.variable(), std::move(children[0]));
    default: return f;
  }
}

template <typename MapTerm>
Formula map_free_terms(const Formula& f, std::set<std::string>& shadowed, MapTerm&& map_term) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::truth: return f;
    case K::atom: {
      std::vector<Term> terms = f.terms();
      for (auto& t : terms)
        if (t.is_variable && !shadowed.count(t.name)) t = map_term(t);
      return Formula::atom(f.predicate(), std::move(terms));
    }
    case K::forall:
    case K::exists: {
      bool inserted = shadowed.insert(f.variable().name).second;
      auto body = map_free_terms(f.children()[0], shadowed, map_term);
      if (inserted) shadowed.erase(f.variable().name);
      return rebuild(f, {std::move(body)});
    }
    default: {
      std::vector<Formula> children;
      children.reserve(f.children().size());
      for (const auto& c : f.children()) children.push_back(map_free_terms(c, shadowed, map_term));
      return rebuild(f, std::move(children));
    }
  }
}

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::truth: return;
    case K::atom:
      for (const auto& t : f.terms())
        if (t.is_variable && !bound.count(t.name)) out.insert(t.name);
      return;
    case K::forall:
    case K::exists: {
      bool inserted = bound.insert(f.variable().name).second;
      collect_free(f.children()[0], bound, out);
      if (inserted) bound.erase(f.variable().name);
      return;
    }
    default:
      for (const auto& c : f.children()) collect_free(c, bound, out);
  }
}

}  // namespace

std::string Formula::to_string() const {
  std::ostringstream os;
  print(os, *this);
  return os.str();
}

Weight Weight::soft(double value) {
  if (!std::isfinite(value)) throw Error("soft weights must be finite");
  return Weight(Kind::soft, value);
}

double Weight::value() const {
  if (kind_ != Kind::soft) throw Error("hard weights have no numeric value");
  return value_;
}

std::string Weight::to_string() const {
  switch (kind_) {
    case Kind::hard: return "hard";
    case Kind::hard_false: return "-hard";
    case Kind::soft: break;
  }
  std::ostringstream os;
  os << value_;
  return os.str();
}

std::string GroundAtomKey::to_string() const {
  std::string s = predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ',';
    s += args[i];
  }
  return s + ")";
}

std::string to_string(const Binding& binding) {
  std::string s = "{";
  bool first = true;
  for (const auto& [var, value] : binding) {
    if (!first) s += ", ";
    first = false;
    s += var + "=" + value;
  }
  return s + "}";
}

UnboundVariable::UnboundVariable(const std::string& variable)
    : Error("variable '" + variable + "' is not bound") {}

EvidenceContradiction::EvidenceContradiction(std::string label, std::string binding)
    : Error("hard formula '" + label + "' is violated by the evidence under " + binding),
      label_(std::move(label)),
      binding_(std::move(binding)) {}

Formula substitute(const Formula& formula, const Binding& binding, bool require_ground) {
  std::set<std::string> shadowed;
  auto result = map_free_terms(formula, shadowed, [&](const Term& t) {
    auto it = binding.find(t.name);
    return it == binding.end() ? t : Term::constant(it->second);
  });
  if (require_ground) {
    auto remaining = free_variables(result);
    if (!remaining.empty()) throw UnboundVariable(*remaining.begin());
  }
  return result;
}

Formula rename_variable(const Formula& formula, const std::string& from, const std::string& to) {
  std::set<std::string> shadowed;
  return map_free_terms(formula, shadowed,
                        [&](const Term& t) { return t.name == from ? Term::var(to) : t; });
}

std::set<std::string> free_variables(const Formula& formula) {
  std::set<std::string> bound, out;
  collect_free(formula, bound, out);
  return out;
}

Formula simplify(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::truth:
    case K::atom: return f;
    case K::negation: {
      auto c = simplify(f.children()[0]);
      if (c.kind() == K::truth) return Formula::truth(!c.truth_value());
      if (c.kind() == K::negation) return c.children()[0];
      return Formula::negate(std::move(c));
    }
    case K::conjunction:
    case K::disjunction: {
      const bool is_and = f.kind() == K::conjunction;
      std::vector<Formula> parts;
      for (const auto& c : f.children()) {
        auto s = simplify(c);
        if (s.kind() == K::truth) {
          if (s.truth_value() == is_and) continue;  // neutral element
          return s;                                 // absorbing element
        }
        if (s.kind() == f.kind()) {
          for (const auto& g : s.children()) parts.push_back(g);
        } else {
          parts.push_back(std::move(s));
        }
      }
      if (parts.empty()) return Formula::truth(is_and);
      if (parts.size() == 1) return parts[0];
      return is_and ? Formula::conjoin(std::move(parts)) : Formula::disjoin(std::move(parts));
    }
    case K::implication: {
      auto a = simplify(f.children()[0]);
      auto c = simplify(f.children()[1]);
      if (a.is_truth(true)) return c;
      if (a.is_truth(false) || c.is_truth(true)) return Formula::top();
      if (c.is_truth(false)) return simplify(Formula::negate(std::move(a)));
      return Formula::implies(std::move(a), std::move(c));
    }
    case K::forall:
    case K::exists: {
      auto body = simplify(f.children()[0]);
      // Only the unconditional cases: the domain of the variable may be empty.
      if (f.kind() == K::forall && body.is_truth(true)) return body;
      if (f.kind() == K::exists && body.is_truth(false)) return body;
      return rebuild(f, {std::move(body)});
    }
  }
  return f;
}

}  // namespace rca::logic
