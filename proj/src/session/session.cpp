#include <algorithm>
#include <deque>
#include <map>

#include "rca/session.hpp"

namespace rca::session {

const char* to_string(Status status) { return status == Status::available ? "available" : "unavailable"; }
const char* to_string(Source source) { return source == Source::manual ? "manual" : "monitoring"; }

Status parse_status(std::string_view text) {
  if (text == "available") return Status::available;
  if (text == "unavailable") return Status::unavailable;
  throw Error("unknown status '" + std::string(text) + "'");
}

Source parse_source(std::string_view text) {
  if (text == "manual") return Source::manual;
  if (text == "monitoring") return Source::monitoring;
  throw Error("unknown observation source '" + std::string(text) + "'");
}

namespace {

std::string describe(const Observation& o) { return std::string(to_string(o.status)) + "(" + o.component + ")"; }

}  // namespace

UnknownComponent::UnknownComponent(const std::string& component)
    : Error("unknown component '" + component + "'") {}

ObservationConflict::ObservationConflict(Observation earlier, std::size_t earlier_index, Observation later)
    : Error("observation " + describe(later) + " conflicts with earlier observation #" +
            std::to_string(earlier_index) + " " + describe(earlier)),
      earlier_(std::move(earlier)),
      earlier_index_(earlier_index),
      later_(std::move(later)) {}

Contradiction::Contradiction(std::vector<std::size_t> indices, std::vector<Observation> observations)
    : Error([&] {
        std::string msg = "observations contradict the model";
        if (!observations.empty()) {
          msg += ":";
          for (std::size_t i = 0; i < observations.size(); ++i)
            msg += " #" + std::to_string(indices[i]) + " " + describe(observations[i]);
        }
        return msg;
      }()),
      indices_(std::move(indices)),
      observations_(std::move(observations)) {}

std::shared_ptr<const CompiledModel> compile_model(model::InfrastructureModel m, abduction::AbductionConfig config) {
  auto program = model::compile_to_mln(m);
  auto compiled = std::make_shared<CompiledModel>();
  compiled->closure = model::compute_redundancy_closure(m);
  compiled->program = abduction::add_reverse_implications(program, config);
  compiled->model = std::move(m);
  compiled->config = std::move(config);
  return compiled;
}

DiagnosisSession::DiagnosisSession(std::shared_ptr<const CompiledModel> compiled) : compiled_(std::move(compiled)) {
  if (!compiled_) throw Error("session needs a compiled model");
}

DiagnosisSession::DiagnosisSession(model::InfrastructureModel m, abduction::AbductionConfig config)
    : DiagnosisSession(compile_model(std::move(m), std::move(config))) {}

void DiagnosisSession::add_observations(const std::vector<Observation>& observations) {
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < log_.size(); ++i) seen.emplace(log_[i].component, i);

  std::vector<Observation> staged;
  for (const auto& o : observations) {
    if (!compiled_->model.has_component(o.component)) throw UnknownComponent(o.component);
    auto it = seen.find(o.component);
    if (it != seen.end()) {
      const auto& earlier = it->second < log_.size() ? log_[it->second] : staged[it->second - log_.size()];
      if (earlier.status != o.status) throw ObservationConflict(earlier, it->second, o);
    } else {
      seen.emplace(o.component, log_.size() + staged.size());
    }
    staged.push_back(o);
  }
  log_.insert(log_.end(), staged.begin(), staged.end());
}

void DiagnosisSession::reset() {
  log_.clear();
  history_.clear();
}

mln::GroundNetwork DiagnosisSession::network() const {
  auto program = compiled_->program;
  for (std::size_t i = 0; i < log_.size(); ++i) {
    const auto& o = log_[i];
    auto f = logic::Formula::atom(model::kUnavailable, {logic::Term::constant(o.component)});
    if (o.status == Status::available) f = logic::Formula::negate(f);
    program.formulas.push_back({std::move(f), logic::Weight::hard(), "observation #" + std::to_string(i),
                                logic::FormulaRole::observation, i});
  }
  return abduction::build_abductive_network(program, compiled_->config);
}

RootCauseReport DiagnosisSession::compute(const DiagnoseOptions& options) const {
  if (options.k == 0) throw Error("k must be positive");
  mln::GroundNetwork net;
  try {
    net = network();
  } catch (const logic::EvidenceContradiction&) {
    // Observations are never folded away at grounding time, so this is the
    // model contradicting itself.
    throw Contradiction({}, {});
  }
  try {
    auto result = mln::map_exact(net, options.k, options.solve);
    return make_report(*compiled_, net, log_, result, options.k);
  } catch (const mln::Unsatisfiable& e) {
    std::vector<std::size_t> indices;
    for (auto origin : e.conflicting()) {
      const auto& o = net.origins.at(origin);
      if (o.role == logic::FormulaRole::observation) indices.push_back(o.ref);
    }
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    std::vector<Observation> obs;
    for (auto i : indices) obs.push_back(log_[i]);
    throw Contradiction(std::move(indices), std::move(obs));
  }
}

const RootCauseReport& DiagnosisSession::diagnose(const DiagnoseOptions& options) {
  history_.push_back(compute(options));
  return history_.back();
}

namespace {

std::vector<Cause> causes_of(const CompiledModel& compiled, const mln::GroundNetwork& net, const mln::World& world) {
  std::vector<Cause> out;
  for (logic::AtomId id = 0; id < net.size(); ++id) {
    const auto& a = net.atoms[id];
    if (a.auxiliary || !world[id] || !compiled.config.cause_predicates.count(a.key.predicate)) continue;
    out.push_back({a.key.args.at(0), a.key.args.size() > 1 ? a.key.args[1] : std::string()});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

RootCauseReport make_report(const CompiledModel& compiled, const mln::GroundNetwork& net,
                            const std::vector<Observation>& log, const mln::MapResult& result, std::size_t k) {
  RootCauseReport report;
  report.world = result.world;
  report.score = result.score;
  report.log_size = log.size();
  report.causes = causes_of(compiled, net, result.world);

  std::set<std::string> down;
  for (const auto& c : compiled.model.components) {
    auto id = net.find({model::kUnavailable, {c}});
    bool unavailable = id && result.world[*id];
    (unavailable ? report.derived_unavailable : report.derived_available).push_back(c);
    if (unavailable) down.insert(c);
  }

  if (k > 1) {
    report.alternatives.push_back({report.causes, result.score});
    for (const auto& alt : result.alternatives)
      report.alternatives.push_back({causes_of(compiled, net, alt.world), alt.score});
  }

  std::map<std::string, std::vector<std::string>> dependents;
  for (const auto* edges : {&compiled.model.specific_deps, &compiled.model.generic_deps})
    for (const auto& e : *edges) dependents[e.to].push_back(e.from);

  std::vector<std::string> targets;
  for (const auto& o : log)
    if (o.status == Status::unavailable && std::find(targets.begin(), targets.end(), o.component) == targets.end())
      targets.push_back(o.component);

  for (const auto& cause : report.causes) {
    std::map<std::string, std::string> parent{{cause.component, cause.component}};
    std::deque<std::string> queue{cause.component};
    while (!queue.empty()) {
      auto node = queue.front();
      queue.pop_front();
      for (const auto& next : dependents[node])
        if (down.count(next) && parent.emplace(next, node).second) queue.push_back(next);
    }
    for (const auto& target : targets) {
      if (!parent.count(target)) continue;
      Explanation ex{cause, target, {}};
      for (auto node = target;; node = parent[node]) {
        ex.path.push_back(node);
        if (node == cause.component) break;
      }
      std::reverse(ex.path.begin(), ex.path.end());
      report.explanations.push_back(std::move(ex));
    }
  }
  return report;
}

}  // namespace rca::session
