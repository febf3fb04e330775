#pragma once

// Iterative diagnosis: observations accumulate in a log, every diagnose call
// runs abductive MAP over the model plus the log and extracts the root cause.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rca/abduction.hpp"
#include "rca/model.hpp"

namespace rca::session {

enum class Status { available, unavailable };
enum class Source { manual, monitoring };

const char* to_string(Status status);
const char* to_string(Source source);
Status parse_status(std::string_view text);
Source parse_source(std::string_view text);

struct Observation {
  std::string component;
  Status status = Status::unavailable;
  Source source = Source::manual;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Cause {
  std::string component;
  std::string risk;

  friend auto operator<=>(const Cause&, const Cause&) = default;
};

/// How a cause reaches an observed-unavailable component: the chain of
/// dependency edges from the cause's component, walked through components
/// that are down in the MAP world. Computed from the model graph, not by the
/// solver.
struct Explanation {
  Cause cause;
  std::string target;
  std::vector<std::string> path;  ///< cause component first, target last
};

struct Alternative {
  std::vector<Cause> causes;
  double score = 0.0;
};

struct RootCauseReport {
  std::vector<Cause> causes;
  std::vector<std::string> derived_unavailable;  ///< model declaration order
  std::vector<std::string> derived_available;
  double score = 0.0;
  /// Empty for k = 1; otherwise every ranked result, the reported one first.
  std::vector<Alternative> alternatives;
  std::vector<Explanation> explanations;
  std::size_t log_size = 0;  ///< observations the report was computed from
  mln::World world;          ///< over the network of that log
};

/// A validated model with its compiled, abduced program.
struct CompiledModel {
  model::InfrastructureModel model;
  model::RedundancyClosure closure;
  abduction::AbductionConfig config;
  mln::MLNProgram program;
};

std::shared_ptr<const CompiledModel> compile_model(model::InfrastructureModel model,
                                                   abduction::AbductionConfig config = {});

class UnknownComponent : public Error {
 public:
  explicit UnknownComponent(const std::string& component);
};

class ObservationConflict : public Error {
 public:
  ObservationConflict(Observation earlier, std::size_t earlier_index, Observation later);
  const Observation& earlier() const { return earlier_; }
  std::size_t earlier_index() const { return earlier_index_; }
  const Observation& later() const { return later_; }

 private:
  Observation earlier_;
  std::size_t earlier_index_;
  Observation later_;
};

/// The observations admit no world under the model.
class Contradiction : public Error {
 public:
  Contradiction(std::vector<std::size_t> indices, std::vector<Observation> observations);
  /// Log indices of a (greedily minimized) conflicting subset.
  const std::vector<std::size_t>& indices() const { return indices_; }
  const std::vector<Observation>& observations() const { return observations_; }

 private:
  std::vector<std::size_t> indices_;
  std::vector<Observation> observations_;
};

struct DiagnoseOptions {
  std::size_t k = 1;
  mln::SolveOptions solve;
};

class DiagnosisSession {
 public:
  explicit DiagnosisSession(std::shared_ptr<const CompiledModel> compiled);
  /// Throws model::ValidationError for an invalid model.
  explicit DiagnosisSession(model::InfrastructureModel model, abduction::AbductionConfig config = {});

  /// All-or-nothing: on UnknownComponent or ObservationConflict the log is
  /// left unchanged. Repeating an earlier observation is accepted.
  void add_observations(const std::vector<Observation>& observations);
  void reset();

  /// Runs MAP on the current log and appends the report to the history.
  const RootCauseReport& diagnose(const DiagnoseOptions& options = {});
  /// Same computation without touching the history.
  RootCauseReport compute(const DiagnoseOptions& options = {}) const;

  /// Ground network for the current log (model + observations).
  mln::GroundNetwork network() const;

  const std::vector<Observation>& log() const { return log_; }
  const std::vector<RootCauseReport>& history() const { return history_; }
  const CompiledModel& compiled() const { return *compiled_; }
  std::shared_ptr<const CompiledModel> compiled_ptr() const { return compiled_; }

 private:
  std::shared_ptr<const CompiledModel> compiled_;
  std::vector<Observation> log_;
  std::vector<RootCauseReport> history_;
};

/// Builds the report for a MAP world of `network`; exposed so the CLI can
/// report an oracle world the same way.
RootCauseReport make_report(const CompiledModel& compiled, const mln::GroundNetwork& network,
                            const std::vector<Observation>& log, const mln::MapResult& result,
                            std::size_t k = 1);

}  // namespace rca::session
