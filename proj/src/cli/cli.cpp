#include "rca/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <optional>
#include <sstream>

#include "rca/serialize.hpp"

namespace rca::cli {

namespace {

struct Options {
  std::string model_path;
  std::string observations_path;
  std::size_t k = 1;
  bool verify = false;
  std::string output = "text";
  std::optional<std::uint64_t> seed;
  std::size_t cap = 20;
  std::optional<double> reverse_weight;
  std::optional<double> mutex_weight;
};

session::DiagnoseOptions diagnose_options(const Options& o) {
  session::DiagnoseOptions d;
  d.k = o.k;
  d.solve.brute_force_cap = o.cap;
  if (o.seed) {
    d.solve.tie_break = mln::TieBreak::seeded_random;
    d.solve.seed = *o.seed;
  }
  return d;
}

abduction::AbductionConfig abduction_config(const Options& o) {
  abduction::AbductionConfig c;
  c.reverse_implication_weight = o.reverse_weight;
  c.mutual_exclusivity_weight = o.mutex_weight;
  return c;
}

std::vector<session::Observation> to_observations(const std::vector<model::ObservedStatus>& parsed) {
  std::vector<session::Observation> out;
  for (const auto& p : parsed)
    out.push_back({p.component, p.available ? session::Status::available : session::Status::unavailable,
                   session::Source::manual, 0});
  return out;
}

std::string cause_text(const session::Cause& c) { return c.component + " " + c.risk; }

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : sep) + i;
  return s;
}

void print_report(std::ostream& out, const session::RootCauseReport& r, const std::string& format) {
  if (format == "json") {
    out << session::to_json(r).dump(2) << '\n';
    return;
  }
  if (r.causes.empty()) {
    out << "causes: none\n";
  } else {
    out << "causes:\n";
    for (const auto& c : r.causes) out << "  " << cause_text(c) << '\n';
  }
  out << "score: " << mln::format_weight(r.score) << '\n';
  out << "derived unavailable: " << (r.derived_unavailable.empty() ? "none" : join(r.derived_unavailable, " ")) << '\n';
  out << "derived available: " << (r.derived_available.empty() ? "none" : join(r.derived_available, " ")) << '\n';
  if (!r.explanations.empty()) {
    out << "explanations (derived from the dependency graph):\n";
    for (const auto& e : r.explanations) out << "  " << cause_text(e.cause) << ": " << join(e.path, " -> ") << '\n';
  }
  for (std::size_t i = 0; i < r.alternatives.size(); ++i) {
    const auto& a = r.alternatives[i];
    std::vector<std::string> names;
    for (const auto& c : a.causes) names.push_back(cause_text(c));
    out << "alternative " << i + 1 << " (score " << mln::format_weight(a.score)
        << "): " << (names.empty() ? "none" : join(names, ", ")) << '\n';
  }
}

int report_contradiction(std::ostream& out, std::ostream& err, const session::Contradiction& e,
                         const std::string& format) {
  if (format == "json")
    out << session::to_json(e).dump(2) << '\n';
  else
    err << "contradiction: " << e.what() << '\n';
  return Exit::contradiction;
}

session::DiagnosisSession open_session(const Options& o) {
  return session::DiagnosisSession(model::load_model_file(o.model_path), abduction_config(o));
}

int cmd_check(const Options& o, std::ostream& out) {
  auto m = model::load_model_file(o.model_path);
  auto report = model::validate_model(m);
  if (o.output == "json") {
    out << model::validation_to_json(report).dump(2) << '\n';
  } else {
    for (const auto& i : report)
      out << (i.severity == model::Severity::error ? "error" : "warning") << " [" << i.code << "] " << i.message
          << '\n';
    if (!model::has_errors(report))
      out << o.model_path << ": " << m.components.size() << " components, " << m.risks.size() << " risks, ok\n";
  }
  return model::has_errors(report) ? Exit::input_error : Exit::ok;
}

int cmd_diagnose(const Options& o, std::ostream& out, std::ostream& err) {
  auto session = open_session(o);
  if (!o.observations_path.empty())
    session.add_observations(to_observations(model::load_observation_file(o.observations_path)));
  const auto options = diagnose_options(o);
  session::RootCauseReport report;
  try {
    report = session.compute(options);
  } catch (const session::Contradiction& e) {
    return report_contradiction(out, err, e, o.output);
  }
  print_report(out, report, o.output);
  if (!o.verify) return Exit::ok;

  auto net = session.network();
  auto oracle = mln::brute_force_map(net, options.solve);
  auto& line_out = o.output == "json" ? err : out;
  if (oracle.score == report.score && oracle.world == report.world) {
    line_out << "oracle agreement: score " << mln::format_weight(oracle.score) << " over "
             << net.non_auxiliary_count() << " atoms\n";
    return Exit::ok;
  }
  line_out << "oracle mismatch: solver score " << mln::format_weight(report.score) << ", oracle score "
           << mln::format_weight(oracle.score) << '\n';
  return Exit::oracle_mismatch;
}

int cmd_dump(const Options& o, std::ostream& out) {
  auto session = open_session(o);
  if (!o.observations_path.empty())
    session.add_observations(to_observations(model::load_observation_file(o.observations_path)));
  mln::dump_network(out, session.network());
  return Exit::ok;
}

int cmd_repl(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  auto session = open_session(o);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string cmd;
    if (!(words >> cmd) || cmd[0] == '#') continue;
    try {
      if (cmd == "quit" || cmd == "exit") {
        break;
      } else if (cmd == "observe") {
        session.add_observations(to_observations(model::parse_observations(line, "<repl>")));
      } else if (cmd == "diagnose") {
        auto options = diagnose_options(o);
        std::size_t k;
        if (words >> k) options.k = k;
        print_report(out, session.diagnose(options), o.output);
      } else if (cmd == "reset") {
        session.reset();
      } else if (cmd == "log") {
        for (const auto& ob : session.log()) out << to_string(ob.status) << ' ' << ob.component << '\n';
      } else {
        err << "unknown command '" << cmd << "' (observe, diagnose [k], reset, log, quit)\n";
      }
    } catch (const session::Contradiction& e) {
      report_contradiction(out, err, e, o.output);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
    }
  }
  return Exit::ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Root cause analysis over infrastructure models", "rcadiag"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* sub) { sub->add_option("model", o.model_path, "Model file")->required(); };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", o.output, "Output format")->check(CLI::IsMember({"text", "json"}));
  };
  auto add_abduction = [&](CLI::App* sub) {
    sub->add_option("--reverse-weight", o.reverse_weight, "Make reverse implications soft with this weight");
    sub->add_option("--mutex-weight", o.mutex_weight, "Add mutual exclusivity clauses with this weight");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("-k", o.k, "Number of ranked results")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Break ties by a random order drawn from this seed");
    sub->add_option("--cap", o.cap, "Atom limit for --brute-force-verify");
  };

  auto* check = app.add_subcommand("check", "Validate a model");
  add_model(check);
  add_output(check);

  auto* diagnose = app.add_subcommand("diagnose", "Compute the most probable root cause");
  add_model(diagnose);
  diagnose->add_option("observations", o.observations_path, "Observation file");
  add_output(diagnose);
  add_solver(diagnose);
  add_abduction(diagnose);
  diagnose->add_flag("--brute-force-verify", o.verify, "Check the result against exhaustive enumeration");

  auto* repl = app.add_subcommand("repl", "Interactive diagnosis on standard input");
  add_model(repl);
  add_output(repl);
  add_solver(repl);
  add_abduction(repl);

  auto* dump = app.add_subcommand("dump", "Print the ground network");
  add_model(dump);
  dump->add_option("observations", o.observations_path, "Observation file");
  add_abduction(dump);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? Exit::ok : Exit::input_error;
  }

  try {
    if (check->parsed()) return cmd_check(o, out);
    if (diagnose->parsed()) return cmd_diagnose(o, out, err);
    if (repl->parsed()) return cmd_repl(o, in, out, err);
    return cmd_dump(o, out);
  } catch (const model::ParseError& e) {
    err << e.what() << '\n';
    return Exit::input_error;
  } catch (const model::ValidationError& e) {
    err << e.what() << '\n';
    return Exit::input_error;
  } catch (const session::ObservationConflict& e) {
    err << "conflict: " << e.what() << '\n';
    return Exit::contradiction;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return Exit::input_error;
  }
}

}  // namespace rca::cli
