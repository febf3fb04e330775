#pragma once

// Shared helpers for the test suites: fixture paths, a random model
// generator, and a semantic diagnosis oracle that never touches the MLN code.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rca/model.hpp"
#include "rca/session.hpp"

namespace rca::testing {

inline std::string fixture(const std::string& name) { return std::string(RCA_FIXTURE_DIR) + "/" + name; }

inline std::vector<session::Observation> load_observations(const std::string& name) {
  std::vector<session::Observation> out;
  for (const auto& o : model::load_observation_file(fixture(name)))
    out.push_back({o.component, o.available ? session::Status::available : session::Status::unavailable,
                   session::Source::manual, 0});
  return out;
}

inline session::Observation down(std::string c) {
  return {std::move(c), session::Status::unavailable, session::Source::manual, 0};
}
inline session::Observation up(std::string c) {
  return {std::move(c), session::Status::available, session::Source::manual, 0};
}

struct GeneratorOptions {
  std::size_t min_components = 2;
  std::size_t max_components = 12;
  std::size_t max_risks_per_component = 3;
  double min_weight = -3.0;
  double max_weight = -0.1;
  std::size_t atom_cap = 20;  ///< components + capabilities
  double edge_probability = 0.3;
  double generic_share = 0.4;
  double redundancy_probability = 0.1;
};

/// Random acyclic model: component i may only depend on components j < i.
inline model::InfrastructureModel random_model(std::mt19937_64& rng, const GeneratorOptions& opt = {}) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(opt.min_weight, opt.max_weight);
  std::uniform_int_distribution<std::size_t> count(opt.min_components, opt.max_components);

  model::InfrastructureModel m;
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) m.components.push_back("C" + std::to_string(i));
  for (std::size_t r = 0; r < opt.max_risks_per_component; ++r) m.risks.push_back("R" + std::to_string(r));

  std::size_t budget = opt.atom_cap > n ? opt.atom_cap - n : 0;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<std::size_t> risks(0, opt.max_risks_per_component);
  for (auto i : order) {
    std::size_t k = std::min(risks(rng), budget);
    budget -= k;
    std::vector<std::size_t> pick(opt.max_risks_per_component);
    for (std::size_t r = 0; r < pick.size(); ++r) pick[r] = r;
    std::shuffle(pick.begin(), pick.end(), rng);
    pick.resize(k);
    std::sort(pick.begin(), pick.end());
    for (auto r : pick) m.risk_capabilities.push_back({m.components[i], m.risks[r], weight(rng), {}});
  }

  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (unit(rng) < opt.edge_probability) {
        auto& list = unit(rng) < opt.generic_share ? m.generic_deps : m.specific_deps;
        list.push_back({m.components[i], m.components[j], {}});
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (unit(rng) < opt.redundancy_probability) m.redundancy_pairs.push_back({m.components[i], m.components[j], {}});
  return m;
}

/// Components switched off by a set of causes: the least fixpoint of the
/// dependency rules, evaluated directly on the model.
inline std::set<std::string> propagate(const model::InfrastructureModel& m, const std::set<session::Cause>& causes) {
  auto closure = model::compute_redundancy_closure(m);
  std::set<std::string> off;
  for (const auto& c : causes) off.insert(c.component);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : m.specific_deps)
      if (off.count(e.to) && off.insert(e.from).second) changed = true;
    for (const auto& e : m.generic_deps) {
      if (!off.count(e.to)) continue;
      const auto& partners = closure.partners(e.to);
      bool all_partners_off =
          std::all_of(partners.begin(), partners.end(), [&](const std::string& p) { return off.count(p) > 0; });
      if (all_partners_off && off.insert(e.from).second) changed = true;
    }
  }
  return off;
}

struct OracleResult {
  bool feasible = false;
  double best = -INFINITY;
  std::vector<std::set<session::Cause>> optima;  ///< every cause set within 1e-9 of best
  std::set<std::string> down;                    ///< for the first optimum
};

/// Enumerates every subset of risk capabilities. On an acyclic model the
/// hard rules plus reverse implications make the unavailable set exactly the
/// propagation of the causes, so a subset is feasible iff that set agrees
/// with the observations. `mutex_weight` adds the pairwise-constraint
/// features per component: weight per true cause and per true pair.
inline OracleResult semantic_oracle(const model::InfrastructureModel& m,
                                    const std::vector<session::Observation>& obs,
                                    std::optional<double> mutex_weight = std::nullopt) {
  std::map<std::pair<std::string, std::string>, double> caps;
  for (const auto& c : model::effective_capabilities(m)) caps[{c.component, c.risk}] += c.weight;
  std::vector<std::pair<session::Cause, double>> list;
  for (const auto& [key, w] : caps) list.push_back({{key.first, key.second}, w});

  OracleResult result;
  std::vector<std::pair<double, std::set<session::Cause>>> feasible;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << list.size()); ++mask) {
    std::set<session::Cause> chosen;
    double score = 0.0;
    std::map<std::string, int> per_component;
    for (std::size_t i = 0; i < list.size(); ++i)
      if (mask >> i & 1) {
        chosen.insert(list[i].first);
        score += list[i].second;
        ++per_component[list[i].first.component];
      }
    if (mutex_weight)
      for (const auto& [_, n] : per_component) score += *mutex_weight * (n + n * (n - 1) / 2.0);
    auto off = propagate(m, chosen);
    bool ok = std::all_of(obs.begin(), obs.end(), [&](const session::Observation& o) {
      return (o.status == session::Status::unavailable) == (off.count(o.component) > 0);
    });
    if (!ok) continue;
    feasible.push_back({score, chosen});
    if (score > result.best) {
      result.best = score;
      result.down = off;
    }
  }
  result.feasible = !feasible.empty();
  for (const auto& [score, set] : feasible)
    if (std::abs(score - result.best) <= 1e-9) result.optima.push_back(set);
  if (result.optima.size() > 1) result.down.clear();
  return result;
}

struct RandomFixture {
  model::InfrastructureModel model;
  std::vector<session::Observation> observations;
};

/// Random observations: half are read off a sampled ground truth (always
/// consistent), half are arbitrary statuses.
inline std::vector<session::Observation> random_observations(const model::InfrastructureModel& m,
                                                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<session::Observation> obs;
  const bool from_truth = unit(rng) < 0.5;
  std::set<std::string> off;
  if (from_truth) {
    std::set<session::Cause> truth;
    for (const auto& c : m.risk_capabilities)
      if (unit(rng) < 0.15) truth.insert({c.component, c.risk});
    off = propagate(m, truth);
  }
  for (const auto& c : m.components) {
    if (unit(rng) >= 0.4) continue;
    bool is_down = from_truth ? off.count(c) > 0 : unit(rng) < 0.5;
    obs.push_back(is_down ? down(c) : up(c));
  }
  return obs;
}

/// `count` satisfiable fixtures from a fixed seed.
inline std::vector<RandomFixture> random_fixtures(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<RandomFixture> out;
  while (out.size() < count) {
    auto m = random_model(rng);
    if (model::has_errors(model::validate_model(m))) continue;
    auto obs = random_observations(m, rng);
    if (!semantic_oracle(m, obs).feasible) continue;
    out.push_back({std::move(m), std::move(obs)});
  }
  return out;
}

}  // namespace rca::testing
