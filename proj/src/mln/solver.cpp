#include <algorithm>
#include <cassert>

#include "rca/mln.hpp"
#include "tie_order.hpp"

namespace rca::mln {

namespace {

using detail::TieKey;
using detail::TieOrder;

constexpr std::int8_t kUnassigned = -1;

// Depth-first branch and bound over atom assignments.
//
// Hard clauses are propagated with per-clause true/false literal counters.
// The bound for a node is the score of the satisfied soft clauses plus the
// positive weight of every soft clause that can still become satisfied. It
// is first checked with running sums and, when that does not prune, recomputed
// in canonical clause order: floating-point addition is monotone, so that sum
// bounds the canonical score of every completion exactly and equal-score
// completions can be cut by the tie-break key.
class BranchAndBound {
 public:
  BranchAndBound(const GroundNetwork& net, const std::vector<GroundClause>& hard,
                 const SolveOptions& options, bool feasibility_only)
      : net_(net),
        hard_(hard),
        soft_(feasibility_only ? empty_ : net.soft_clauses),
        order_(net, options),
        feasibility_only_(feasibility_only) {
    const std::size_t n = net.size();
    value_.assign(n, kUnassigned);
    hard_occ_.resize(n);
    soft_occ_.resize(n);
    for (std::size_t c = 0; c < hard_.size(); ++c)
      for (const auto& l : hard_[c].literals) hard_occ_[l.atom].push_back({c, l.positive});
    for (std::size_t c = 0; c < soft_.size(); ++c)
      for (const auto& l : soft_[c].literals) soft_occ_[l.atom].push_back({c, l.positive});
    hard_true_.assign(hard_.size(), 0);
    hard_false_.assign(hard_.size(), 0);
    soft_true_.assign(soft_.size(), 0);
    soft_false_.assign(soft_.size(), 0);
    for (const auto& c : soft_)
      if (!c.literals.empty()) open_positive_ += std::max(c.weight.value(), 0.0);

    for (AtomId i = 0; i < n; ++i)
      if (net.is_hypothesis(i)) branch_order_.push_back(i);
    for (AtomId i = 0; i < n; ++i)
      if (!net.is_hypothesis(i) && !net.atoms[i].auxiliary) branch_order_.push_back(i);
    for (AtomId i = 0; i < n; ++i)
      if (net.atoms[i].auxiliary) branch_order_.push_back(i);
    for (AtomId i = 0; i < n; ++i)
      if (net.is_hypothesis(i)) ++hypothesis_total_;
  }

  /// Returns the best world, or nothing when the hard clauses are unsatisfiable.
  std::optional<ScoredWorld> run() {
    for (std::size_t c = 0; c < hard_.size(); ++c) {
      if (hard_[c].literals.empty()) return std::nullopt;
      if (hard_[c].literals.size() == 1) pending_.push_back(hard_[c].literals[0]);
    }
    if (propagate()) search(0);
    if (!best_) return std::nullopt;
    return ScoredWorld{best_->world, best_score_};
  }

 private:
  struct Occurrence {
    std::size_t clause;
    bool positive;
  };

  struct Best {
    World world;
    TieKey key;
  };

  void search(std::size_t cursor) {
    if (done_) return;
    while (cursor < branch_order_.size() && value_[branch_order_[cursor]] != kUnassigned) ++cursor;
    if (cursor == branch_order_.size()) {
      leaf();
      return;
    }
    if (best_ && prune()) return;

    const AtomId atom = branch_order_[cursor];
    for (bool v : {false, true}) {
      const std::size_t mark = trail_.size();
      pending_.push_back(Literal{atom, v});
      if (propagate()) search(cursor + 1);
      undo(mark);
      if (done_) return;
    }
  }

  bool prune() {
    if (sat_sum_ + open_positive_ < best_score_ - 1e-6) return true;
    double ub = 0.0;
    for (std::size_t c = 0; c < soft_.size(); ++c) {
      const double w = soft_[c].weight.value();
      if (soft_true_[c] > 0)
        ub += w;
      else if (soft_false_[c] < soft_[c].literals.size())
        ub += std::max(w, 0.0);
      else
        ub += 0.0;
    }
    if (ub < best_score_) return true;
    if (ub > best_score_) return false;

    // Equal scores at best: compare what is already fixed of the tie key.
    if (hypothesis_true_ > best_->key.hypothesis_count) return true;
    if (hypothesis_assigned_ < hypothesis_total_) return false;
    std::vector<std::uint32_t> ranks;
    for (AtomId i = 0; i < net_.size(); ++i)
      if (net_.is_hypothesis(i) && value_[i] == 1) ranks.push_back(order_.rank(i));
    std::sort(ranks.begin(), ranks.end());
    if (ranks != best_->key.hypothesis_ranks) return best_->key.hypothesis_ranks < ranks;
    return visible_true_ > best_->key.true_count;
  }

  void leaf() {
    World w;
    w.values.resize(value_.size());
    for (std::size_t i = 0; i < value_.size(); ++i) w.values[i] = value_[i] == 1;
    if (feasibility_only_) {
      best_ = Best{std::move(w), {}};
      done_ = true;
      return;
    }
    auto scored = score_world(net_, w);
    assert(scored.feasible());
    auto key = order_.key(net_, w);
    if (!best_ || detail::better(scored.score, key, best_score_, best_->key)) {
      best_score_ = scored.score;
      best_ = Best{std::move(w), std::move(key)};
    }
  }

  bool propagate() {
    while (!pending_.empty()) {
      Literal l = pending_.back();
      pending_.pop_back();
      const auto current = value_[l.atom];
      if (current != kUnassigned) {
        if ((current == 1) != l.positive) {
          pending_.clear();
          return false;
        }
        continue;
      }
      if (!assign(l.atom, l.positive)) {
        pending_.clear();
        return false;
      }
    }
    return true;
  }

  bool assign(AtomId atom, bool v) {
    value_[atom] = v ? 1 : 0;
    trail_.push_back(atom);
    if (net_.is_hypothesis(atom)) {
      ++hypothesis_assigned_;
      if (v) ++hypothesis_true_;
    }
    if (v && !net_.atoms[atom].auxiliary) ++visible_true_;

    for (const auto& [c, positive] : soft_occ_[atom]) {
      const auto& clause = soft_[c];
      const double w = clause.weight.value();
      if (positive == v) {
        if (soft_true_[c]++ == 0) {
          sat_sum_ += w;
          if (soft_false_[c] < clause.literals.size()) open_positive_ -= std::max(w, 0.0);
        }
      } else {
        if (++soft_false_[c] == clause.literals.size() && soft_true_[c] == 0)
          open_positive_ -= std::max(w, 0.0);
      }
    }

    bool ok = true;
    for (const auto& [c, positive] : hard_occ_[atom]) {
      if (positive == v) {
        ++hard_true_[c];
        continue;
      }
      ++hard_false_[c];
      if (hard_true_[c] > 0) continue;
      const auto size = hard_[c].literals.size();
      if (hard_false_[c] == size) {
        ok = false;
      } else if (hard_false_[c] + 1 == size) {
        for (const auto& l : hard_[c].literals)
          if (value_[l.atom] == kUnassigned) {
            pending_.push_back(l);
            break;
          }
      }
    }
    return ok;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const AtomId atom = trail_.back();
      trail_.pop_back();
      const bool v = value_[atom] == 1;
      for (const auto& [c, positive] : hard_occ_[atom]) {
        if (positive == v)
          --hard_true_[c];
        else
          --hard_false_[c];
      }
      for (const auto& [c, positive] : soft_occ_[atom]) {
        const auto& clause = soft_[c];
        const double w = clause.weight.value();
        if (positive == v) {
          if (--soft_true_[c] == 0) {
            sat_sum_ -= w;
            if (soft_false_[c] < clause.literals.size()) open_positive_ += std::max(w, 0.0);
          }
        } else {
          if (soft_false_[c]-- == clause.literals.size() && soft_true_[c] == 0)
            open_positive_ += std::max(w, 0.0);
        }
      }
      if (net_.is_hypothesis(atom)) {
        --hypothesis_assigned_;
        if (v) --hypothesis_true_;
      }
      if (v && !net_.atoms[atom].auxiliary) --visible_true_;
      value_[atom] = kUnassigned;
    }
  }

  const GroundNetwork& net_;
  const std::vector<GroundClause>& hard_;
  static inline const std::vector<GroundClause> empty_{};
  const std::vector<GroundClause>& soft_;
  TieOrder order_;
  bool feasibility_only_;

  std::vector<std::int8_t> value_;
  std::vector<AtomId> trail_;
  std::vector<Literal> pending_;
  std::vector<std::vector<Occurrence>> hard_occ_, soft_occ_;
  std::vector<std::size_t> hard_true_, hard_false_, soft_true_, soft_false_;
  std::vector<AtomId> branch_order_;

  double sat_sum_ = 0.0;
  double open_positive_ = 0.0;
  std::size_t hypothesis_total_ = 0;
  std::size_t hypothesis_assigned_ = 0;
  std::size_t hypothesis_true_ = 0;
  std::size_t visible_true_ = 0;

  std::optional<Best> best_;
  double best_score_ = 0.0;
  bool done_ = false;
};

bool feasible_with(const GroundNetwork& net, const std::vector<GroundClause>& hard) {
  BranchAndBound bnb(net, hard, {}, true);
  return bnb.run().has_value();
}

std::vector<std::uint32_t> conflicting_observations(const GroundNetwork& net) {
  std::vector<GroundClause> base;
  std::vector<std::uint32_t> observed;
  for (const auto& c : net.hard_clauses) {
    const bool is_obs = c.origin < net.origins.size() &&
                        net.origins[c.origin].role == logic::FormulaRole::observation;
    if (!is_obs) {
      base.push_back(c);
    } else if (std::find(observed.begin(), observed.end(), c.origin) == observed.end()) {
      observed.push_back(c.origin);
    }
  }
  if (!feasible_with(net, base)) return {};

  auto with = [&](const std::vector<std::uint32_t>& keep) {
    auto hard = base;
    for (const auto& c : net.hard_clauses)
      if (std::find(keep.begin(), keep.end(), c.origin) != keep.end()) hard.push_back(c);
    return hard;
  };
  std::vector<std::uint32_t> core = observed;
  for (std::size_t i = 0; i < core.size();) {
    auto trial = core;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (!feasible_with(net, with(trial)))
      core = std::move(trial);
    else
      ++i;
  }
  return core;
}

}  // namespace

bool satisfiable(const GroundNetwork& network) { return feasible_with(network, network.hard_clauses); }

MapResult map_exact(const GroundNetwork& network, std::size_t k, const SolveOptions& options) {
  if (k == 0) throw Error("k must be positive");
  network.check();

  std::vector<GroundClause> hard = network.hard_clauses;
  std::vector<AtomId> hypotheses;
  for (AtomId i = 0; i < network.size(); ++i)
    if (network.is_hypothesis(i)) hypotheses.push_back(i);

  MapResult result;
  for (std::size_t round = 0; round < k; ++round) {
    BranchAndBound bnb(network, hard, options, false);
    auto found = bnb.run();
    if (!found) {
      if (round == 0) throw Unsatisfiable(conflicting_observations(network));
      break;
    }
    // The reported score is always the canonical one.
    found->score = score_world(network, found->world).score;
    if (round == 0) {
      result.world = found->world;
      result.score = found->score;
      result.optimal = true;
    } else {
      result.alternatives.push_back(*found);
    }
    if (hypotheses.empty()) break;
    GroundClause block;
    block.weight = logic::Weight::hard();
    block.origin = 0;
    for (AtomId h : hypotheses) block.literals.push_back(Literal{h, !found->world[h]});
    hard.push_back(std::move(block));
  }
  return result;
}

}  // namespace rca::mln
