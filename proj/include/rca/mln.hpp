#pragma once

// Ground Markov network construction, world scoring and exact MAP solving.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rca/logic.hpp"

namespace rca::mln {

using logic::AtomId;
using logic::GroundClause;
using logic::Literal;

struct MLNProgram {
  logic::Signature signature;
  std::vector<logic::WeightedFormula> formulas;
  logic::Domain domain;
  logic::Evidence evidence;
};

struct AtomInfo {
  logic::GroundAtomKey key;
  logic::PredicateClass cls = logic::PredicateClass::derived;
  bool auxiliary = false;
};

/// Source of a group of ground clauses: one grounding of one formula.
struct Origin {
  std::size_t formula = 0;
  std::string label;
  logic::FormulaRole role = logic::FormulaRole::model;
  std::size_t ref = 0;
  std::string binding;
};

class GroundNetwork {
 public:
  std::vector<AtomInfo> atoms;
  std::vector<GroundClause> hard_clauses;
  std::vector<GroundClause> soft_clauses;
  std::vector<Origin> origins;

  std::size_t size() const { return atoms.size(); }
  std::size_t non_auxiliary_count() const;
  std::optional<AtomId> find(const logic::GroundAtomKey& key) const;
  bool is_hypothesis(AtomId id) const {
    return !atoms[id].auxiliary && atoms[id].cls == logic::PredicateClass::hypothesis;
  }

  /// Checks literal indices and soft weights; throws rca::Error.
  void check() const;
};

/// Ground every formula, eliminate closed-world evidence and clausify.
///
/// Non-auxiliary atoms are numbered in (predicate, arguments) order and
/// auxiliary atoms follow in formula order, so identical programs always
/// produce identical networks. Hypothesis atoms forced false by a hard
/// negative unit are eliminated together with the unit.
GroundNetwork build_ground_network(const MLNProgram& program);

/// A truth value per atom of the network it is scored against.
struct World {
  std::vector<bool> values;

  bool operator[](AtomId id) const { return values[id]; }
  friend bool operator==(const World&, const World&) = default;
};

struct WorldScore {
  double score = 0.0;
  std::vector<std::size_t> violated_hard;  ///< indices into hard_clauses

  bool feasible() const { return violated_hard.empty(); }
};

/// Sum of the weights of satisfied soft clauses, in clause order; hard
/// clauses are constraints only. Throws rca::Error on a size mismatch.
WorldScore score_world(const GroundNetwork& network, const World& world);

bool clause_satisfied(const GroundClause& clause, const World& world);

enum class TieBreak { deterministic, seeded_random };

struct SolveOptions {
  TieBreak tie_break = TieBreak::deterministic;
  std::uint64_t seed = 0;
  /// Largest number of non-auxiliary atoms the enumerating routines accept.
  std::size_t brute_force_cap = 20;
};

struct ScoredWorld {
  World world;
  double score = 0.0;
};

struct MapResult {
  World world;
  double score = 0.0;
  bool optimal = true;
  std::vector<ScoredWorld> alternatives;  ///< next-best results when k > 1
};

/// The hard clauses admit no world. `conflicting` holds origin ids of
/// observation clauses that are jointly inconsistent with the rest of the
/// network (greedily minimized; empty if the network is inconsistent on its own).
class Unsatisfiable : public Error {
 public:
  explicit Unsatisfiable(std::vector<std::uint32_t> conflicting);
  const std::vector<std::uint32_t>& conflicting() const { return conflicting_; }

 private:
  std::vector<std::uint32_t> conflicting_;
};

class CapExceeded : public Error {
 public:
  CapExceeded(std::size_t atoms, std::size_t cap);
};

/// Exact MAP by branch and bound. With k > 1 further results are produced
/// by blocking the hypothesis-atom pattern of every world found so far.
///
/// Among worlds of equal score the winner has the fewest true hypothesis
/// atoms, then the lexicographically smallest set of true hypothesis atoms,
/// then the fewest true atoms overall, then the smallest true-atom set.
/// In seeded_random mode the lexicographic comparisons use a permutation of
/// atom ids drawn from the seed.
MapResult map_exact(const GroundNetwork& network, std::size_t k = 1, const SolveOptions& options = {});

/// Exhaustive enumeration over the non-auxiliary atoms; auxiliary atoms take
/// the unique value their defining clauses allow. Same tie-break as map_exact.
MapResult brute_force_map(const GroundNetwork& network, const SolveOptions& options = {});

struct Partition {
  double z = 0.0;
  double probability = 0.0;
};

/// Z over all hard-satisfying worlds and P(world) = exp(score) / Z.
/// Testing aid; refuses networks above the brute-force cap.
Partition partition_and_probability(const GroundNetwork& network, const World& world,
                                    const SolveOptions& options = {});

/// Every hard-satisfying world with its score, in enumeration order.
std::vector<ScoredWorld> enumerate_worlds(const GroundNetwork& network, const SolveOptions& options = {});

/// Is there any world satisfying the hard clauses?
bool satisfiable(const GroundNetwork& network);

/// Text dump: one `A<id> <pred>(<args>)` line per atom, then one
/// `H : <lits>` line per hard clause and `S<w> : <lits>` per soft clause.
void dump_network(std::ostream& os, const GroundNetwork& network);

std::string format_weight(double w);

}  // namespace rca::mln
