#include <algorithm>
#include <cmath>
#include <set>

#include "rca/mln.hpp"

namespace rca::mln {

using logic::Formula;
using logic::GroundAtomKey;
using logic::GroundFormula;
using logic::PredicateClass;
using logic::Weight;
using K = Formula::Kind;

std::size_t GroundNetwork::non_auxiliary_count() const {
  return static_cast<std::size_t>(
      std::count_if(atoms.begin(), atoms.end(), [](const AtomInfo& a) { return !a.auxiliary; }));
}

std::optional<AtomId> GroundNetwork::find(const GroundAtomKey& key) const {
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (atoms[i].key == key) return static_cast<AtomId>(i);
  return std::nullopt;
}

void GroundNetwork::check() const {
  auto check_clause = [&](const GroundClause& c) {
    for (const auto& l : c.literals)
      if (l.atom >= atoms.size()) throw Error("clause references unknown atom " + std::to_string(l.atom));
    if (c.origin >= origins.size() && !origins.empty())
      throw Error("clause references unknown origin " + std::to_string(c.origin));
  };
  for (const auto& c : hard_clauses) {
    if (!c.weight.is_hard()) throw Error("soft weight on a hard clause");
    check_clause(c);
  }
  for (const auto& c : soft_clauses) {
    if (!c.weight.is_soft() || !std::isfinite(c.weight.value()))
      throw Error("soft clauses need finite weights");
    check_clause(c);
  }
}

namespace {

GroundAtomKey key_of(const Formula& atom) {
  GroundAtomKey key{atom.predicate(), {}};
  for (const auto& t : atom.terms()) key.args.push_back(t.name);
  return key;
}

void collect_atoms(const Formula& f, std::set<GroundAtomKey>& out) {
  if (f.kind() == K::atom) {
    out.insert(key_of(f));
    return;
  }
  for (const auto& c : f.children()) collect_atoms(c, out);
}

Formula fix_false(const Formula& f, const std::set<GroundAtomKey>& forced) {
  if (f.kind() == K::truth) return f;
  if (f.kind() == K::atom) return forced.count(key_of(f)) ? Formula::bottom() : f;
  std::vector<Formula> children;
  for (const auto& c : f.children()) children.push_back(fix_false(c, forced));
  switch (f.kind()) {
    case K::negation: return Formula::negate(children[0]);
    case K::conjunction: return Formula::conjoin(std::move(children));
    case K::disjunction: return Formula::disjoin(std::move(children));
    case K::implication: return Formula::implies(children[0], children[1]);
    default: return f;
  }
}

// A hard ground formula that only says "this hypothesis atom is false".
std::optional<GroundAtomKey> forced_false_hypothesis(const GroundFormula& g, const logic::Signature& sig) {
  const Formula* atom = nullptr;
  if (g.weight.kind() == Weight::Kind::hard && g.formula.kind() == K::negation &&
      g.formula.children()[0].kind() == K::atom)
    atom = &g.formula.children()[0];
  else if (g.weight.kind() == Weight::Kind::hard_false && g.formula.kind() == K::atom)
    atom = &g.formula;
  if (!atom) return std::nullopt;
  if (sig.at(atom->predicate()).cls != PredicateClass::hypothesis) return std::nullopt;
  return key_of(*atom);
}

}  // namespace

GroundNetwork build_ground_network(const MLNProgram& program) {
  std::vector<GroundFormula> ground;
  for (std::size_t i = 0; i < program.formulas.size(); ++i) {
    auto g = logic::ground_formula(program.formulas[i], program.signature, program.domain,
                                   program.evidence, i);
    ground.insert(ground.end(), std::make_move_iterator(g.begin()), std::make_move_iterator(g.end()));
  }

  std::set<GroundAtomKey> forced;
  while (true) {
    std::set<GroundAtomKey> fresh;
    for (const auto& g : ground)
      if (auto key = forced_false_hypothesis(g, program.signature); key && !forced.count(*key))
        fresh.insert(*key);
    if (fresh.empty()) break;
    forced.insert(fresh.begin(), fresh.end());
    std::vector<GroundFormula> kept;
    for (auto& g : ground) {
      auto f = logic::simplify(fix_false(g.formula, forced));
      if (f.kind() == K::truth) {
        const bool value = f.truth_value();
        if ((g.weight.kind() == Weight::Kind::hard && !value) ||
            (g.weight.kind() == Weight::Kind::hard_false && value)) {
          const auto& wf = program.formulas[g.source];
          throw logic::EvidenceContradiction(wf.label.empty() ? wf.formula.to_string() : wf.label,
                                             logic::to_string(g.binding));
        }
        continue;
      }
      g.formula = std::move(f);
      kept.push_back(std::move(g));
    }
    ground = std::move(kept);
  }

  std::set<GroundAtomKey> keys;
  for (const auto& g : ground) collect_atoms(g.formula, keys);
  logic::AtomTable table;
  for (const auto& key : keys) table.intern(key);

  GroundNetwork net;
  for (const auto& g : ground) {
    const auto& wf = program.formulas[g.source];
    auto origin = static_cast<std::uint32_t>(net.origins.size());
    net.origins.push_back(Origin{g.source, wf.label, wf.role, wf.ref, logic::to_string(g.binding)});
    auto c = logic::clausify(g, table, origin);
    for (auto& h : c.hard) net.hard_clauses.push_back(std::move(h));
    for (auto& s : c.soft) net.soft_clauses.push_back(std::move(s));
  }

  for (const auto& e : table.entries()) {
    AtomInfo info{e.key, PredicateClass::derived, e.auxiliary};
    if (!e.auxiliary) info.cls = program.signature.at(e.key.predicate).cls;
    net.atoms.push_back(std::move(info));
  }

  auto by_literals = [](const GroundClause& a, const GroundClause& b) { return a.literals < b.literals; };
  std::stable_sort(net.hard_clauses.begin(), net.hard_clauses.end(), by_literals);
  std::stable_sort(net.soft_clauses.begin(), net.soft_clauses.end(), by_literals);
  return net;
}

bool clause_satisfied(const GroundClause& clause, const World& world) {
  for (const auto& l : clause.literals)
    if (world.values[l.atom] == l.positive) return true;
  return false;
}

WorldScore score_world(const GroundNetwork& network, const World& world) {
  if (world.values.size() != network.atoms.size())
    throw Error("world has " + std::to_string(world.values.size()) + " atoms, network has " +
                std::to_string(network.atoms.size()));
  WorldScore out;
  for (std::size_t i = 0; i < network.hard_clauses.size(); ++i)
    if (!clause_satisfied(network.hard_clauses[i], world)) out.violated_hard.push_back(i);
  for (const auto& c : network.soft_clauses)
    if (clause_satisfied(c, world)) out.score += c.weight.value();
  return out;
}

Unsatisfiable::Unsatisfiable(std::vector<std::uint32_t> conflicting)
    : Error("hard clauses are unsatisfiable"), conflicting_(std::move(conflicting)) {}

CapExceeded::CapExceeded(std::size_t atoms, std::size_t cap)
    : Error("network has " + std::to_string(atoms) + " non-auxiliary atoms, enumeration cap is " +
            std::to_string(cap)) {}

}  // namespace rca::mln
