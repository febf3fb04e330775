#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include "rca/mln.hpp"

namespace rca::mln::detail {

/// Ordering key among worlds of equal score; smaller is preferred.
struct TieKey {
  std::size_t hypothesis_count = 0;
  std::vector<std::uint32_t> hypothesis_ranks;  // sorted
  std::size_t true_count = 0;
  std::vector<std::uint32_t> true_ranks;  // sorted

  friend bool operator<(const TieKey& a, const TieKey& b) {
    return std::tie(a.hypothesis_count, a.hypothesis_ranks, a.true_count, a.true_ranks) <
           std::tie(b.hypothesis_count, b.hypothesis_ranks, b.true_count, b.true_ranks);
  }
  friend bool operator==(const TieKey&, const TieKey&) = default;
};

class TieOrder {
 public:
  TieOrder(const GroundNetwork& net, const SolveOptions& options) : rank_(net.size()) {
    std::iota(rank_.begin(), rank_.end(), 0u);
    if (options.tie_break == TieBreak::seeded_random) {
      std::mt19937_64 rng(options.seed);
      std::shuffle(rank_.begin(), rank_.end(), rng);
    }
  }

  std::uint32_t rank(AtomId id) const { return rank_[id]; }

  TieKey key(const GroundNetwork& net, const World& w) const {
    TieKey k;
    for (AtomId i = 0; i < net.size(); ++i) {
      if (!w[i] || net.atoms[i].auxiliary) continue;
      k.true_ranks.push_back(rank_[i]);
      if (net.is_hypothesis(i)) k.hypothesis_ranks.push_back(rank_[i]);
    }
    std::sort(k.true_ranks.begin(), k.true_ranks.end());
    std::sort(k.hypothesis_ranks.begin(), k.hypothesis_ranks.end());
    k.true_count = k.true_ranks.size();
    k.hypothesis_count = k.hypothesis_ranks.size();
    return k;
  }

 private:
  std::vector<std::uint32_t> rank_;
};

/// Does (score_a, key_a) beat (score_b, key_b)? Scores compare exactly.
inline bool better(double score_a, const TieKey& key_a, double score_b, const TieKey& key_b) {
  if (score_a != score_b) return score_a > score_b;
  return key_a < key_b;
}

}  // namespace rca::mln::detail
