#include <cmath>

#include "rca/mln.hpp"
#include "tie_order.hpp"

namespace rca::mln {

namespace {

// Visits every hard-satisfying world exactly once. Auxiliary atoms are not
// enumerated: each one is set to the only value its defining hard clauses
// allow given the other atoms.
class WorldEnumerator {
 public:
  WorldEnumerator(const GroundNetwork& net, const SolveOptions& options) : net_(net) {
    net.check();
    for (AtomId i = 0; i < net.size(); ++i) {
      if (net.atoms[i].auxiliary)
        auxiliaries_.push_back(i);
      else
        free_.push_back(i);
    }
    if (free_.size() > options.brute_force_cap) throw CapExceeded(free_.size(), options.brute_force_cap);
    definitions_.resize(net.size());
    for (std::size_t c = 0; c < net.hard_clauses.size(); ++c)
      for (const auto& l : net.hard_clauses[c].literals)
        if (net.atoms[l.atom].auxiliary) definitions_[l.atom].push_back(c);
  }

  template <typename Visit>
  void run(Visit&& visit) {
    World w;
    w.values.assign(net_.size(), false);
    const std::uint64_t count = std::uint64_t{1} << free_.size();
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      for (std::size_t b = 0; b < free_.size(); ++b) w.values[free_[b]] = (mask >> b) & 1u;
      for (AtomId a : auxiliaries_) {
        w.values[a] = false;
        for (auto c : definitions_[a])
          if (!clause_satisfied(net_.hard_clauses[c], w)) {
            w.values[a] = true;
            break;
          }
      }
      bool feasible = true;
      for (const auto& c : net_.hard_clauses)
        if (!clause_satisfied(c, w)) {
          feasible = false;
          break;
        }
      if (!feasible) continue;
      double score = 0.0;
      for (const auto& c : net_.soft_clauses)
        if (clause_satisfied(c, w)) score += c.weight.value();
      visit(w, score);
    }
  }

 private:
  const GroundNetwork& net_;
  std::vector<AtomId> free_;
  std::vector<AtomId> auxiliaries_;
  std::vector<std::vector<std::size_t>> definitions_;
};

}  // namespace

MapResult brute_force_map(const GroundNetwork& network, const SolveOptions& options) {
  WorldEnumerator worlds(network, options);
  detail::TieOrder order(network, options);
  std::optional<MapResult> best;
  detail::TieKey best_key;
  worlds.run([&](const World& w, double score) {
    auto key = order.key(network, w);
    if (!best || detail::better(score, key, best->score, best_key)) {
      best = MapResult{w, score, true, {}};
      best_key = std::move(key);
    }
  });
  if (!best) throw Unsatisfiable({});
  return *best;
}

std::vector<ScoredWorld> enumerate_worlds(const GroundNetwork& network, const SolveOptions& options) {
  WorldEnumerator worlds(network, options);
  std::vector<ScoredWorld> out;
  worlds.run([&](const World& w, double score) { out.push_back({w, score}); });
  return out;
}

Partition partition_and_probability(const GroundNetwork& network, const World& world,
                                    const SolveOptions& options) {
  WorldEnumerator worlds(network, options);
  Partition p;
  worlds.run([&](const World&, double score) { p.z += std::exp(score); });
  auto scored = score_world(network, world);
  if (scored.feasible() && p.z > 0.0) p.probability = std::exp(scored.score) / p.z;
  return p;
}

}  // namespace rca::mln
