#pragma once

// Turning a deductive MLN program into an abductive one: every group of hard
// implications sharing a consequent predicate gets a reverse implication
// "effect => one of the possible causes", optionally with pairwise mutual
// exclusivity clauses over the cause atoms.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rca/mln.hpp"

namespace rca::abduction {

struct AbductionConfig {
  /// nullopt: reverse implications are hard. Otherwise their soft weight.
  std::optional<double> reverse_implication_weight;
  /// nullopt: no mutual exclusivity clauses. Otherwise their weight.
  std::optional<double> mutual_exclusivity_weight;
  std::set<std::string> cause_predicates{"affectedByRisk"};
};

/// Adds, for every derived predicate P that is the consequent of at least one
/// hard implication  forall v (B_i => P(x)),  the formula
///   forall x (P(x) => exists v_1 B_1 | ... | exists v_n B_n)
/// where each v_i are the variables of rule i not occurring in its head.
mln::MLNProgram add_reverse_implications(const mln::MLNProgram& program, const AbductionConfig& config);

/// Pairwise-constraint clauses for n cause atoms: n(n-1)/2 pair clauses and
/// n singleton clauses, (n^2 + n)/2 in total. With a negative weight they
/// penalize a cause being true and two causes being true together.
///
/// The pair feature (h_i & h_j, weight) is not a clause, so it is emitted as
/// its complement (!h_i | !h_j) with weight -weight; world scores shift by a
/// constant and MAP states are unchanged.
std::vector<logic::GroundClause> pc_mutex_clauses(std::span<const logic::AtomId> heads, double weight,
                                                  std::uint32_t origin = 0);

/// Appends pc_mutex_clauses for the cause atoms of every ground reverse
/// implication. No-op when the config omits mutual exclusivity.
void add_mutual_exclusivity(mln::GroundNetwork& network, const AbductionConfig& config);

/// build_ground_network followed by add_mutual_exclusivity.
mln::GroundNetwork build_abductive_network(const mln::MLNProgram& program, const AbductionConfig& config);

struct PreconditionIssue {
  std::size_t formula = 0;
  std::string label;
  double weight = 0.0;
};

/// Soft formulas with weight >= 0, excluding the reverse implications
/// themselves. An empty result means every cause is penalized, so MAP is
/// already biased against multiple explanations and mutual exclusivity
/// clauses can be left out.
std::vector<PreconditionIssue> check_abduction_preconditions(const mln::MLNProgram& program);

}  // namespace rca::abduction
