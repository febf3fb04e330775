#pragma once

// First-order formulas over a finite sorted domain, closed-world grounding
// and clausification into weighted ground clauses.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rca/error.hpp"

namespace rca::logic {

enum class Sort { component, risk, type_tag };

const char* to_string(Sort sort);

struct Constant {
  std::string name;
  Sort sort = Sort::component;

  friend bool operator==(const Constant&, const Constant&) = default;
};

/// Evidence predicates are closed-world and compiled away during grounding.
/// Hypothesis predicates are the candidate causes; derived predicates are
/// everything else that stays open in the ground network.
enum class PredicateClass { evidence, hypothesis, derived };

struct PredicateDecl {
  std::string name;
  std::vector<Sort> arg_sorts;
  PredicateClass cls = PredicateClass::derived;

  std::size_t arity() const { return arg_sorts.size(); }
};

class Signature {
 public:
  /// Throws rca::Error when the name is already declared.
  void declare(PredicateDecl decl);

  const PredicateDecl* find(const std::string& name) const;
  const PredicateDecl& at(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  std::vector<const PredicateDecl*> predicates() const;

 private:
  std::map<std::string, PredicateDecl> decls_;
};

struct Variable {
  std::string name;
  Sort sort = Sort::component;
};

struct Term {
  bool is_variable = false;
  std::string name;

  static Term var(std::string name) { return {true, std::move(name)}; }
  static Term constant(std::string name) { return {false, std::move(name)}; }

  friend bool operator==(const Term&, const Term&) = default;
};

/// Immutable formula tree with shared structure. Copies are cheap.
class Formula {
 public:
  enum class Kind { truth, atom, negation, conjunction, disjunction, implication, forall, exists };

  static Formula top();
  static Formula bottom();
  static Formula truth(bool value);
  static Formula atom(std::string predicate, std::vector<Term> terms);
  static Formula negate(Formula f);
  static Formula conjoin(std::vector<Formula> parts);
  static Formula disjoin(std::vector<Formula> parts);
  static Formula implies(Formula antecedent, Formula consequent);
  static Formula forall(Variable var, Formula body);
  static Formula exists(Variable var, Formula body);

  Kind kind() const;
  bool is_truth(bool value) const;
  bool truth_value() const;
  const std::string& predicate() const;
  const std::vector<Term>& terms() const;
  /// Operands: one for negation and quantifiers, two for implication
  /// (antecedent, consequent), any number for conjunction/disjunction.
  const std::vector<Formula>& children() const;
  const Variable& variable() const;

  /// Structural equality.
  bool operator==(const Formula& other) const;

  std::string to_string() const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Weight of a formula. The hard markers are never compared numerically.
class Weight {
 public:
  enum class Kind { soft, hard, hard_false };

  static Weight soft(double value);
  /// +infinity: the formula must hold in every world.
  static Weight hard() { return Weight(Kind::hard, 0.0); }
  /// -infinity: the formula must be false in every world.
  static Weight hard_false() { return Weight(Kind::hard_false, 0.0); }

  Kind kind() const { return kind_; }
  bool is_soft() const { return kind_ == Kind::soft; }
  bool is_hard() const { return kind_ != Kind::soft; }
  /// Only valid for soft weights.
  double value() const;

  std::string to_string() const;

  friend bool operator==(const Weight&, const Weight&) = default;

 private:
  Weight(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

/// Where a formula came from. Used to trace ground clauses back to their
/// source, e.g. to report which observations conflict.
enum class FormulaRole { model, reverse_implication, observation, mutual_exclusivity, blocking };

struct WeightedFormula {
  Formula formula;
  Weight weight = Weight::hard();
  std::string label;
  FormulaRole role = FormulaRole::model;
  /// Free-form back reference, e.g. the observation log index.
  std::size_t ref = 0;
};

struct GroundAtomKey {
  std::string predicate;
  std::vector<std::string> args;

  std::string to_string() const;
  friend auto operator<=>(const GroundAtomKey&, const GroundAtomKey&) = default;
};

/// Closed-world facts: every ground atom of an evidence predicate not in
/// this set is false.
using Evidence = std::set<GroundAtomKey>;

using Domain = std::vector<Constant>;

/// variable name -> constant name
using Binding = std::map<std::string, std::string>;

std::string to_string(const Binding& binding);

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(const std::string& variable);
};

class SortError : public Error {
 public:
  using Error::Error;
};

/// A hard formula became false (or a hard_false formula became true) once
/// the closed-world evidence was substituted.
class EvidenceContradiction : public Error {
 public:
  EvidenceContradiction(std::string label, std::string binding);
  const std::string& label() const { return label_; }
  const std::string& binding() const { return binding_; }

 private:
  std::string label_;
  std::string binding_;
};

/// Replace free occurrences of the bound variables by constants. With
/// `require_ground`, any variable left free afterwards is an error.
Formula substitute(const Formula& formula, const Binding& binding, bool require_ground = false);

/// Rename free occurrences of a variable.
Formula rename_variable(const Formula& formula, const std::string& from, const std::string& to);

std::set<std::string> free_variables(const Formula& formula);

/// Constant folding and flattening; does not change the set of models.
Formula simplify(const Formula& formula);

struct GroundFormula {
  Formula formula;
  Weight weight = Weight::hard();
  std::size_t source = 0;  ///< index of the originating WeightedFormula
  Binding binding;
};

/// Expand quantifiers over the sorted domain and fold in the closed-world
/// evidence. Returns one ground formula per binding of the leading universal
/// quantifiers that did not simplify to a truth constant.
std::vector<GroundFormula> ground_formula(const WeightedFormula& wf, const Signature& signature,
                                          const Domain& domain, const Evidence& evidence,
                                          std::size_t source = 0);

using AtomId = std::uint32_t;

struct Literal {
  AtomId atom = 0;
  bool positive = true;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct GroundClause {
  std::vector<Literal> literals;
  Weight weight = Weight::hard();
  std::uint32_t origin = 0;
};

/// Assigns dense ids to ground atoms and allocates auxiliary atoms.
class AtomTable {
 public:
  struct Entry {
    GroundAtomKey key;
    bool auxiliary = false;
  };

  AtomId intern(const GroundAtomKey& key);
  std::optional<AtomId> find(const GroundAtomKey& key) const;
  AtomId fresh_auxiliary();

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;
  std::map<GroundAtomKey, AtomId> index_;
  std::size_t aux_count_ = 0;
};

struct Clausified {
  std::vector<GroundClause> hard;
  std::vector<GroundClause> soft;
  std::vector<AtomId> auxiliaries;
};

/// Hard formulas become their CNF. A soft formula that is a single clause
/// keeps its weight; any other soft formula F gets a fresh atom a with hard
/// clauses for a <=> F and a soft unit clause (a, w), which preserves world
/// scores exactly for either sign of w.
Clausified clausify(const GroundFormula& gf, AtomTable& atoms, std::uint32_t origin = 0);

/// Sort literals, drop duplicates. Returns false for tautologies.
bool normalize_clause(std::vector<Literal>& literals);

}  // namespace rca::logic
