#include <gtest/gtest.h>

#include "rca/abduction.hpp"
#include "support/support.hpp"

using namespace rca;
using namespace rca::testing;
using logic::FormulaRole;
using logic::GroundAtomKey;

namespace {

mln::GroundNetwork abductive_network(const model::InfrastructureModel& m, const abduction::AbductionConfig& config = {}) {
  return abduction::build_abductive_network(abduction::add_reverse_implications(model::compile_to_mln(m), config),
                                            config);
}

/// Ground reverse-implication clauses with the negative literal unavailable(component),
/// each as the set of its other literals.
std::vector<std::set<std::string>> reverse_clauses(const mln::GroundNetwork& net, const std::string& component) {
  auto head = net.find({model::kUnavailable, {component}});
  if (!head) throw std::runtime_error("no atom for " + component);
  std::vector<std::set<std::string>> result;
  for (const auto& c : net.hard_clauses) {
    if (net.origins[c.origin].role != FormulaRole::reverse_implication) continue;
    bool match = std::any_of(c.literals.begin(), c.literals.end(),
                             [&](const logic::Literal& l) { return l.atom == *head && !l.positive; });
    if (!match) continue;
    std::set<std::string> out;
    for (const auto& l : c.literals)
      if (l.atom != *head) out.insert((l.positive ? "" : "!") + net.atoms[l.atom].key.to_string());
    result.push_back(std::move(out));
  }
  return result;
}

}  // namespace

TEST(ReverseImplication, ScanServiceHasOneDisjunctPerDependency) {
  auto net = abductive_network(model::load_model_file(fixture("printer.model")));
  // Specific dependency on the printer, generic one on LDAP (no redundant
  // partner, so the partner conjunction is empty), no risks of its own.
  auto clauses = reverse_clauses(net, "ScanService");
  ASSERT_EQ(clauses.size(), 1u);
  EXPECT_EQ(clauses[0], (std::set<std::string>{"unavailable(OfficePrinter)", "unavailable(LDAPService)"}));
}

TEST(ReverseImplication, LeafComponentNeedsItsRisk) {
  auto m = model::parse_model("component PowerSupply\nrisk PowerOutage\nhasRisk PowerSupply PowerOutage weight -2.3\n");
  auto net = abductive_network(m);
  EXPECT_EQ(reverse_clauses(net, "PowerSupply"),
            (std::vector<std::set<std::string>>{{"affectedByRisk(PowerSupply,PowerOutage)"}}));
}

TEST(ReverseImplication, GenericDependencyNeedsEveryPartnerDown) {
  auto net = abductive_network(model::load_model_file(fixture("redundancy.model")));
  // unavailable(App) => affectedByRisk(App, Crash) | (unavailable(DB1) & unavailable(DB2)),
  // distributed into two hard clauses.
  auto clauses = reverse_clauses(net, "App");
  std::sort(clauses.begin(), clauses.end());
  EXPECT_EQ(clauses, (std::vector<std::set<std::string>>{{"affectedByRisk(App,Crash)", "unavailable(DB1)"},
                                                         {"affectedByRisk(App,Crash)", "unavailable(DB2)"}}));
}

TEST(ReverseImplication, IsolatedComponentCannotBeDown) {
  auto m = model::parse_model("component Lonely\ncomponent Other\nrisk Fire\nhasRisk Other Fire weight -1\n");
  session::DiagnosisSession s(m);
  s.add_observations({down("Lonely")});
  try {
    s.diagnose();
    FAIL() << "expected Contradiction";
  } catch (const session::Contradiction& e) {
    EXPECT_EQ(e.indices(), std::vector<std::size_t>{0});
  }
  EXPECT_THROW(mln::map_exact(s.network()), mln::Unsatisfiable);
}

TEST(ReverseImplication, UndeclaredCausePredicateIsRejected) {
  auto program = model::compile_to_mln(model::load_model_file(fixture("small.model")));
  abduction::AbductionConfig config;
  config.cause_predicates = {"occurs"};
  EXPECT_THROW(abduction::add_reverse_implications(program, config), Error);
  config.cause_predicates = {model::kUnavailable};
  EXPECT_THROW(abduction::add_reverse_implications(program, config), Error);
}

TEST(ReverseImplication, SoftModeUsesConfiguredWeight) {
  abduction::AbductionConfig config;
  config.reverse_implication_weight = -4.0;
  auto program =
      abduction::add_reverse_implications(model::compile_to_mln(model::load_model_file(fixture("small.model"))), config);
  std::size_t reverse = 0;
  for (const auto& f : program.formulas)
    if (f.role == FormulaRole::reverse_implication) {
      ++reverse;
      EXPECT_EQ(f.weight, logic::Weight::soft(-4.0));
    }
  EXPECT_EQ(reverse, 1u);
}

TEST(PcMutex, ClauseCounts) {
  for (std::size_t n = 0; n <= 12; ++n) {
    std::vector<logic::AtomId> heads;
    for (std::size_t i = 0; i < n; ++i) heads.push_back(static_cast<logic::AtomId>(i * 2));
    auto clauses = abduction::pc_mutex_clauses(heads, -0.7);
    EXPECT_EQ(clauses.size(), (n * n + n) / 2);
  }
  std::vector<logic::AtomId> three{0, 1, 2};
  EXPECT_EQ(abduction::pc_mutex_clauses(three, -1.0).size(), 6u);
  std::vector<logic::AtomId> one{4};
  EXPECT_EQ(abduction::pc_mutex_clauses(one, -1.0).size(), 1u);
}

TEST(PcMutex, FeaturesPenalizeCausesAndPairs) {
  std::vector<logic::AtomId> heads{0, 1, 2};
  mln::GroundNetwork net;
  for (int i = 0; i < 3; ++i) net.atoms.push_back({{"h", {std::to_string(i)}}, logic::PredicateClass::hypothesis, false});
  net.soft_clauses = abduction::pc_mutex_clauses(heads, -0.5);
  // Relative to the empty world: -0.5 per true cause and -0.5 per true pair.
  const double base = mln::score_world(net, {{false, false, false}}).score;
  EXPECT_DOUBLE_EQ(mln::score_world(net, {{true, false, false}}).score - base, -0.5);
  EXPECT_DOUBLE_EQ(mln::score_world(net, {{true, true, false}}).score - base, -1.5);
  EXPECT_DOUBLE_EQ(mln::score_world(net, {{true, true, true}}).score - base, -3.0);
}

TEST(PcMutex, DuplicateHeadsAreRejected) {
  std::vector<logic::AtomId> heads{1, 1};
  EXPECT_THROW(abduction::pc_mutex_clauses(heads, -1.0), Error);
}

TEST(PcMutex, AttachedPerReverseImplication) {
  auto m = model::parse_model(
      "component S\nrisk A\nrisk B\nrisk C\n"
      "hasRisk S A weight -1\nhasRisk S B weight -1.5\nhasRisk S C weight -2\n");
  abduction::AbductionConfig config;
  auto plain = abductive_network(m, config);
  config.mutual_exclusivity_weight = -0.5;
  auto with = abductive_network(m, config);
  EXPECT_EQ(with.soft_clauses.size() - plain.soft_clauses.size(), 6u);
}

TEST(Preconditions, PrinterIsAllNegative) {
  auto program = model::compile_to_mln(model::load_model_file(fixture("printer.model")));
  EXPECT_TRUE(abduction::check_abduction_preconditions(program).empty());
  EXPECT_TRUE(abduction::check_abduction_preconditions(abduction::add_reverse_implications(program, {})).empty());
}

TEST(Preconditions, NonNegativeWeightsAreReported) {
  for (double w : {0.5, 0.0}) {
    model::InfrastructureModel m = model::load_model_file(fixture("small.model"));
    m.risk_capabilities[1].weight = w;
    auto issues = abduction::check_abduction_preconditions(model::compile_to_mln(m));
    ASSERT_EQ(issues.size(), 1u) << w;
    EXPECT_EQ(issues[0].weight, w);
    EXPECT_NE(issues[0].label.find("Web"), std::string::npos);
  }
}

// Every component down in a MAP world has a reason in the model: one of its
// own risks, a specific dependency that is down, or a generic dependency
// that is down together with all its redundant partners.
TEST(AbductionProperty, ExplanationCompleteness) {
  std::size_t down_components = 0;
  for (const auto& f : random_fixtures(120, 42)) {
    session::DiagnosisSession s(f.model);
    s.add_observations(f.observations);
    auto net = s.network();
    auto r = mln::map_exact(net);
    auto closure = model::compute_redundancy_closure(f.model);
    auto is_down = [&](const std::string& c) { return r.world[*net.find({model::kUnavailable, {c}})]; };
    for (const auto& c : f.model.components) {
      if (!is_down(c)) continue;
      ++down_components;
      bool explained = false;
      for (const auto& cap : f.model.risk_capabilities)
        if (cap.component == c) {
          auto id = net.find({model::kAffectedByRisk, {c, cap.risk}});
          explained |= id && r.world[*id];
        }
      for (const auto& e : f.model.specific_deps) explained |= e.from == c && is_down(e.to);
      for (const auto& e : f.model.generic_deps) {
        if (e.from != c || !is_down(e.to)) continue;
        const auto& partners = closure.partners(e.to);
        explained |= std::all_of(partners.begin(), partners.end(), is_down);
      }
      EXPECT_TRUE(explained) << c;
    }
  }
  EXPECT_GT(down_components, 50u);
}

TEST(AbductionProperty, ParsimonyUnderNegativeWeights) {
  for (const auto& f : random_fixtures(120, 43)) {
    session::DiagnosisSession s(f.model);
    s.add_observations(f.observations);
    auto net = s.network();
    auto r = mln::brute_force_map(net);
    for (logic::AtomId i = 0; i < net.size(); ++i) {
      if (!net.is_hypothesis(i) || !r.world[i]) continue;
      auto w = r.world;
      w.values[i] = false;
      EXPECT_FALSE(mln::score_world(net, w).feasible());
    }
  }
}

// The singleton features of the pairwise encoding add the mutual exclusivity
// weight to every cause, so they can outweigh a gap between explanations of
// different sizes. Here two cheap overloads (-0.8 - 0.9 = -1.7) beat the host
// crash (-2.0) without the clauses, and lose to it with weight -0.5
// (-1.7 - 1.0 = -2.7 against -2.0 - 0.5 = -2.5).
TEST(PcMutex, SingletonFeaturesCanChangeTheAnswer) {
  auto m = model::load_model_file(fixture("small.model"));
  auto obs = load_observations("small.obs");

  session::DiagnosisSession plain(m);
  plain.add_observations(obs);
  auto a = plain.diagnose();
  EXPECT_EQ(a.causes, (std::vector<session::Cause>{{"Mail", "Overload"}, {"Web", "Overload"}}));
  EXPECT_DOUBLE_EQ(a.score, -1.7);

  abduction::AbductionConfig config;
  config.mutual_exclusivity_weight = -0.5;
  session::DiagnosisSession with(m, config);
  with.add_observations(obs);
  auto b = with.diagnose();
  EXPECT_EQ(b.causes, (std::vector<session::Cause>{{"Host", "Crash"}}));

  auto oracle = semantic_oracle(m, obs, -0.5);
  ASSERT_EQ(oracle.optima.size(), 1u);
  EXPECT_EQ(oracle.optima[0], (std::set<session::Cause>{{"Host", "Crash"}}));
}
