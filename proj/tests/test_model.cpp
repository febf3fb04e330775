#include <gtest/gtest.h>

#include "rca/abduction.hpp"
#include "rca/serialize.hpp"
#include "support/support.hpp"

using namespace rca;
using namespace rca::testing;

namespace {

const model::ValidationIssue* find_issue(const model::ValidationReport& r, const std::string& code) {
  for (const auto& i : r)
    if (i.code == code) return &i;
  return nullptr;
}

std::string parse_error_text(std::string_view text) {
  try {
    model::parse_model(text, "m");
  } catch (const model::ParseError& e) {
    return e.what();
  }
  return "";
}

mln::GroundNetwork abductive(const model::InfrastructureModel& m) {
  return abduction::build_abductive_network(abduction::add_reverse_implications(model::compile_to_mln(m), {}), {});
}

}  // namespace

TEST(Parse, SingleCapability) {
  auto m = model::parse_model("component PowerSupply\nrisk PowerOutage\nhasRisk PowerSupply PowerOutage weight -2.3\n");
  EXPECT_EQ(m.components, std::vector<std::string>{"PowerSupply"});
  EXPECT_EQ(m.risks, std::vector<std::string>{"PowerOutage"});
  ASSERT_EQ(m.risk_capabilities.size(), 1u);
  EXPECT_EQ(m.risk_capabilities[0].weight, -2.3);
  EXPECT_EQ(m.risk_capabilities[0].where.line, 3u);
}

TEST(Parse, SpecificDependency) {
  auto m = model::parse_model("component MailService\ncomponent mail.uni-ma\ndependsSpecific MailService mail.uni-ma\n");
  ASSERT_EQ(m.specific_deps.size(), 1u);
  EXPECT_EQ(m.specific_deps[0].from, "MailService");
  EXPECT_EQ(m.specific_deps[0].to, "mail.uni-ma");
}

TEST(Parse, EmptyDocument) {
  auto m = model::parse_model("");
  EXPECT_TRUE(m.components.empty());
  EXPECT_TRUE(model::parse_model("# only a comment\n\n   \n").components.empty());
}

TEST(Parse, DeclarationsInAnyOrder) {
  auto m = model::parse_model("dependsSpecific A B\ncomponent B\ncomponent A\n");
  EXPECT_EQ(m.components, (std::vector<std::string>{"B", "A"}));
  EXPECT_EQ(m.specific_deps.size(), 1u);
}

TEST(Parse, TypesAndRules) {
  auto m = model::parse_model(
      "type SCSIHardDrive\ncomponent DriveInstance1\ninstanceOf DriveInstance1 SCSIHardDrive\n"
      "risk HeadCrash\ntypeRisk SCSIHardDrive HeadCrash weight -1.8 # comment\n");
  EXPECT_EQ(m.types, std::vector<std::string>{"SCSIHardDrive"});
  ASSERT_EQ(m.type_risk_rules.size(), 1u);
  EXPECT_EQ(m.type_risk_rules[0].weight, -1.8);
}

TEST(ParseErrors, UnknownKeywordWithLocation) {
  auto text = parse_error_text("component A\n  compnent B\n");
  EXPECT_NE(text.find("m:2:3"), std::string::npos) << text;
  EXPECT_NE(text.find("unknown keyword 'compnent'"), std::string::npos) << text;
}

TEST(ParseErrors, DuplicateDeclaration) {
  auto text = parse_error_text("component A\ncomponent A\n");
  EXPECT_NE(text.find("m:2:"), std::string::npos) << text;
  EXPECT_NE(text.find("duplicate declaration"), std::string::npos) << text;
}

TEST(ParseErrors, UndeclaredReference) {
  auto text = parse_error_text("component A\ndependsSpecific A Ghost\n");
  EXPECT_NE(text.find("undeclared component 'Ghost'"), std::string::npos) << text;
}

TEST(ParseErrors, AllProblemsReportedTogether) {
  try {
    model::parse_model("bogus\ncomponent A\nhasRisk A R weight heavy\nrisk R\nredundant A\n");
    FAIL();
  } catch (const model::ParseError& e) {
    ASSERT_EQ(e.diagnostics().size(), 3u);
    EXPECT_EQ(e.diagnostics()[0].where.line, 1u);
    EXPECT_EQ(e.diagnostics()[1].where.line, 3u);
    EXPECT_EQ(e.diagnostics()[2].where.line, 5u);
  }
}

TEST(ParseErrors, NonFiniteWeightRejected) {
  EXPECT_NE(parse_error_text("component A\nrisk R\nhasRisk A R weight nan\n").find("invalid weight"), std::string::npos);
}

TEST(Observations, ParseFile) {
  auto obs = model::load_observation_file(fixture("printer.obs"));
  ASSERT_EQ(obs.size(), 3u);
  EXPECT_EQ(obs[0].component, "PrintService");
  EXPECT_TRUE(obs[0].available);
  EXPECT_FALSE(obs[2].available);
  EXPECT_THROW(model::parse_observations("observe sideways A\n"), model::ParseError);
}

TEST(Validate, PrinterIsClean) {
  EXPECT_TRUE(model::validate_model(model::load_model_file(fixture("printer.model"))).empty());
  EXPECT_TRUE(model::validate_model(model::load_model_file(fixture("svn.model"))).empty());
}

TEST(Validate, BothDependencyKinds) {
  model::InfrastructureModel m;
  m.components = {"A", "B"};
  m.specific_deps = {{"A", "B", {}}};
  m.generic_deps = {{"A", "B", {}}};
  auto r = model::validate_model(m);
  auto* issue = find_issue(r, "exclusive-dependency");
  ASSERT_NE(issue, nullptr);
  EXPECT_EQ(issue->names, (std::vector<std::string>{"A", "B"}));
  EXPECT_TRUE(model::has_errors(r));
}

TEST(Validate, CycleWithPath) {
  auto r = model::validate_model(model::load_model_file(fixture("cyclic.model")));
  auto* issue = find_issue(r, "dependency-cycle");
  ASSERT_NE(issue, nullptr);
  EXPECT_GE(issue->names.size(), 3u);
  EXPECT_EQ(issue->names.front(), issue->names.back());
  EXPECT_NE(issue->message.find(" -> "), std::string::npos);
}

TEST(Validate, TwoNodeCycle) {
  model::InfrastructureModel m;
  m.components = {"A", "B"};
  m.specific_deps = {{"A", "B", {}}, {"B", "A", {}}};
  auto report = model::validate_model(m);
  auto* issue = find_issue(report, "dependency-cycle");
  ASSERT_NE(issue, nullptr);
  EXPECT_EQ(issue->message, "dependency cycle A -> B -> A");
}

// B generically depends on A, whose partner C depends on B: if A and C are
// down, B is down, which keeps C down.
TEST(Validate, CycleThroughRedundancyPartner) {
  model::InfrastructureModel m;
  m.components = {"A", "B", "C"};
  m.generic_deps = {{"B", "A", {}}};
  m.specific_deps = {{"C", "B", {}}};
  m.redundancy_pairs = {{"A", "C", {}}};
  EXPECT_NE(find_issue(model::validate_model(m), "dependency-cycle"), nullptr);
}

TEST(Validate, OtherChecks) {
  model::InfrastructureModel m;
  m.components = {"A", "A", "unavailable"};
  m.risks = {"R"};
  m.types = {"hasRisk"};
  m.redundancy_pairs = {{"A", "A", {}}};
  m.specific_deps = {{"A", "Ghost", {}}};
  m.risk_capabilities = {{"A", "R", 0.5, {}}, {"A", "R", INFINITY, {}}};
  auto r = model::validate_model(m);
  for (const char* code : {"duplicate-name", "reserved-name", "self-redundancy", "undeclared-name", "non-finite-weight",
                           "non-negative-weight"})
    EXPECT_NE(find_issue(r, code), nullptr) << code;
  EXPECT_EQ(find_issue(r, "non-negative-weight")->severity, model::Severity::warning);
}

TEST(Validate, WarningsAloneAreNotErrors) {
  auto m = model::parse_model("component A\nrisk R\nhasRisk A R weight 0\n");
  auto r = model::validate_model(m);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(model::has_errors(r));
  EXPECT_NO_THROW(model::compile_to_mln(m));
}

TEST(Compile, InvalidModelThrows) {
  EXPECT_THROW(model::compile_to_mln(model::load_model_file(fixture("cyclic.model"))), model::ValidationError);
  EXPECT_THROW(session::DiagnosisSession(model::load_model_file(fixture("cyclic.model"))), model::ValidationError);
}

TEST(Compile, CapabilityBecomesSoftUnit) {
  auto program = model::compile_to_mln(model::load_model_file(fixture("printer.model")));
  auto net = mln::build_ground_network(program);
  auto id = net.find({model::kAffectedByRisk, {"mail.uni-ma", "MaliciousSoftware"}});
  ASSERT_TRUE(id);
  std::size_t units = 0;
  for (const auto& c : net.soft_clauses)
    if (c.literals == std::vector<logic::Literal>{{*id, true}}) {
      ++units;
      EXPECT_EQ(c.weight, logic::Weight::soft(-1.2));
    }
  EXPECT_EQ(units, 1u);
}

TEST(Compile, PrinterAtoms) {
  auto m = model::load_model_file(fixture("printer.model"));
  auto net = abductive(m);
  std::size_t unavailable = 0, causes = 0;
  for (const auto& a : net.atoms) {
    if (a.auxiliary) continue;
    unavailable += a.key.predicate == model::kUnavailable;
    causes += a.key.predicate == model::kAffectedByRisk;
  }
  EXPECT_EQ(unavailable, m.components.size());
  EXPECT_EQ(causes, m.risk_capabilities.size());
}

TEST(Compile, TypeRuleOnTwoMembers) {
  auto m = model::parse_model(
      "type SCSIHardDrive\nrisk HeadCrash\ncomponent DriveInstance1\ncomponent DriveInstance2\ncomponent Bus\n"
      "instanceOf DriveInstance1 SCSIHardDrive\ninstanceOf DriveInstance2 SCSIHardDrive\n"
      "typeRisk SCSIHardDrive HeadCrash weight -1.8\n");
  auto net = mln::build_ground_network(model::compile_to_mln(m));
  std::vector<std::string> units;
  for (const auto& c : net.soft_clauses) {
    ASSERT_EQ(c.literals.size(), 1u);
    EXPECT_EQ(c.weight, logic::Weight::soft(-1.8));
    units.push_back(net.atoms[c.literals[0].atom].key.to_string());
  }
  EXPECT_EQ(units, (std::vector<std::string>{"affectedByRisk(DriveInstance1,HeadCrash)",
                                             "affectedByRisk(DriveInstance2,HeadCrash)"}));
}

TEST(Compile, TypeRuleEqualsExpandedCapabilities) {
  auto typed = model::parse_model(
      "type Disk\nrisk HeadCrash\nrisk Wear\ncomponent D1\ncomponent D2\ncomponent Host\n"
      "dependsSpecific Host D1\ndependsGeneric Host D2\n"
      "instanceOf D1 Disk\ninstanceOf D2 Disk\ntypeRisk Disk HeadCrash weight -1.8\nhasRisk D1 Wear weight -0.7\n");
  auto direct = model::parse_model(
      "risk HeadCrash\nrisk Wear\ncomponent D1\ncomponent D2\ncomponent Host\n"
      "dependsSpecific Host D1\ndependsGeneric Host D2\n"
      "hasRisk D1 HeadCrash weight -1.8\nhasRisk D2 HeadCrash weight -1.8\nhasRisk D1 Wear weight -0.7\n");
  auto a = abductive(typed), b = abductive(direct);
  ASSERT_EQ(a.size(), b.size());
  for (logic::AtomId i = 0; i < a.size(); ++i) EXPECT_EQ(a.atoms[i].key, b.atoms[i].key);
  auto clauses = [](const std::vector<logic::GroundClause>& list) {
    std::vector<std::pair<std::vector<logic::Literal>, std::string>> out;
    for (const auto& c : list) out.push_back({c.literals, c.weight.to_string()});
    std::sort(out.begin(), out.end());
    return out;
  };
  EXPECT_EQ(clauses(a.hard_clauses), clauses(b.hard_clauses));
  EXPECT_EQ(clauses(a.soft_clauses), clauses(b.soft_clauses));
}

TEST(Compile, DeterministicProgram) {
  const auto text = model::to_dsl(model::load_model_file(fixture("svn.model")));
  auto a = model::compile_to_mln(model::parse_model(text));
  auto b = model::compile_to_mln(model::parse_model(text));
  ASSERT_EQ(a.formulas.size(), b.formulas.size());
  for (std::size_t i = 0; i < a.formulas.size(); ++i) {
    EXPECT_EQ(a.formulas[i].formula, b.formulas[i].formula);
    EXPECT_EQ(a.formulas[i].label, b.formulas[i].label);
  }
  EXPECT_EQ(a.domain, b.domain);
  EXPECT_EQ(a.evidence, b.evidence);
  std::ostringstream da, db;
  mln::dump_network(da, abductive(model::parse_model(text)));
  mln::dump_network(db, abductive(model::parse_model(text)));
  EXPECT_EQ(da.str(), db.str());
}

TEST(Closure, ChainIsSymmetricAndTransitive) {
  model::InfrastructureModel m;
  m.components = {"A", "B", "C", "D"};
  m.redundancy_pairs = {{"A", "B", {}}, {"B", "C", {}}};
  auto closure = model::compute_redundancy_closure(m);
  EXPECT_EQ(closure.partners("A"), (std::set<std::string>{"B", "C"}));
  EXPECT_EQ(closure.partners("B"), (std::set<std::string>{"A", "C"}));
  EXPECT_EQ(closure.partners("C"), (std::set<std::string>{"A", "B"}));
  EXPECT_TRUE(closure.partners("D").empty());
}

TEST(ClosureProperty, MatchesFixedPoint) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    model::InfrastructureModel m;
    const std::size_t n = 1 + rng() % 10;
    for (std::size_t i = 0; i < n; ++i) m.components.push_back("C" + std::to_string(i));
    for (std::size_t k = 0, pairs = rng() % 8; k < pairs; ++k) {
      auto a = rng() % n, b = rng() % n;
      if (a != b) m.redundancy_pairs.push_back({m.components[a], m.components[b], {}});
    }
    // Relation R: pairs plus symmetric and transitive steps until nothing changes.
    std::set<std::pair<std::string, std::string>> rel;
    for (const auto& e : m.redundancy_pairs) rel.insert({e.from, e.to});
    for (bool changed = true; changed;) {
      changed = false;
      auto snapshot = rel;
      for (const auto& [a, b] : snapshot) {
        changed |= rel.insert({b, a}).second;
        for (const auto& [c, d] : snapshot)
          if (b == c) changed |= rel.insert({a, d}).second;
      }
    }
    auto closure = model::compute_redundancy_closure(m);
    for (const auto& x : m.components) {
      std::set<std::string> expected;
      for (const auto& [a, b] : rel)
        if (a == x && b != x) expected.insert(b);
      EXPECT_EQ(closure.partners(x), expected) << x;
    }
  }
}

TEST(Availability, NoObservationsAllAvailable) {
  for (const char* name : {"printer.model", "svn.model", "redundancy.model"}) {
    auto net = abductive(model::load_model_file(fixture(name)));
    auto r = mln::map_exact(net);
    EXPECT_EQ(r.score, 0.0);
    for (logic::AtomId i = 0; i < net.size(); ++i)
      if (!net.atoms[i].auxiliary) EXPECT_FALSE(r.world[i]) << net.atoms[i].key.to_string();
  }
}

TEST(Availability, LiveRedundantPartnerKeepsDependentUp) {
  session::DiagnosisSession s(model::load_model_file(fixture("redundancy.model")));
  s.add_observations({down("DB1")});
  auto r = s.diagnose();
  EXPECT_EQ(r.causes, (std::vector<session::Cause>{{"DB1", "Crash"}}));
  EXPECT_EQ(r.derived_unavailable, std::vector<std::string>{"DB1"});
  s.add_observations({down("DB2")});
  EXPECT_EQ(s.diagnose().derived_unavailable, (std::vector<std::string>{"App", "DB1", "DB2"}));
}

TEST(Serialization, DslRoundTrip) {
  for (const char* name : {"printer.model", "svn.model", "redundancy.model", "small.model"}) {
    auto m = model::load_model_file(fixture(name));
    auto text = model::to_dsl(m);
    EXPECT_EQ(model::to_dsl(model::parse_model(text)), text) << name;
  }
  auto typed = model::parse_model("type T\ncomponent A\ninstanceOf A T\nrisk R\ntypeRisk T R weight -1.8\n");
  EXPECT_EQ(model::to_dsl(model::parse_model(model::to_dsl(typed))), model::to_dsl(typed));
}

TEST(Serialization, JsonRoundTrip) {
  auto m = model::load_model_file(fixture("printer.model"));
  auto doc = model::model_to_json(m);
  EXPECT_EQ(model::to_dsl(model::model_from_json(doc)), model::to_dsl(m));
  EXPECT_EQ(model::model_to_json(model::model_from_json(doc)), doc);
}

TEST(Serialization, GraphDocument) {
  auto g = model::graph_to_json(model::load_model_file(fixture("redundancy.model")));
  EXPECT_EQ(g["nodes"].size(), 3u);
  std::set<std::string> kinds;
  for (const auto& e : g["edges"]) kinds.insert(e["kind"].get<std::string>());
  EXPECT_TRUE(kinds.count("generic"));
  EXPECT_TRUE(kinds.count("redundancy"));
}
