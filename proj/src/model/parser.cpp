#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "rca/model.hpp"

namespace rca::model {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

template <typename PerLine>
void for_each_line(std::string_view text, PerLine&& per_line) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    per_line(line_no, tokenize(text.substr(pos, end - pos)));
    pos = end + 1;
  }
}

std::optional<double> parse_weight(std::string_view s) {
  double value = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

struct Arity {
  std::size_t args;
  bool weighted;
};

const std::map<std::string_view, Arity>& keywords() {
  static const std::map<std::string_view, Arity> table{
      {"component", {1, false}},     {"risk", {1, false}},          {"type", {1, false}},
      {"dependsSpecific", {2, false}}, {"dependsGeneric", {2, false}}, {"redundant", {2, false}},
      {"instanceOf", {2, false}},    {"hasRisk", {2, true}},        {"typeRisk", {2, true}},
  };
  return table;
}

enum class Kind { component, risk, type };

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::component: return "component";
    case Kind::risk: return "risk";
    case Kind::type: return "type";
  }
  return "?";
}

struct Reference {
  std::string name;
  Kind kind;
  SourceLocation where;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

bool InfrastructureModel::has_component(std::string_view name) const {
  return std::find(components.begin(), components.end(), name) != components.end();
}
bool InfrastructureModel::has_risk(std::string_view name) const {
  return std::find(risks.begin(), risks.end(), name) != risks.end();
}
bool InfrastructureModel::has_type(std::string_view name) const {
  return std::find(types.begin(), types.end(), name) != types.end();
}

ParseError::ParseError(std::string source, std::vector<Diagnostic> diagnostics)
    : Error([&] {
        std::string msg;
        for (const auto& d : diagnostics) {
          if (!msg.empty()) msg += '\n';
          msg += source + ":" + std::to_string(d.where.line) + ":" + std::to_string(d.where.column) + ": " +
                 d.message;
        }
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

InfrastructureModel parse_model(std::string_view text, std::string source) {
  InfrastructureModel model;
  std::vector<Diagnostic> diags;
  std::map<std::string, std::pair<Kind, SourceLocation>> declared;
  std::vector<Reference> refs;
  std::set<std::tuple<std::string, std::string, std::string>> statements;

  for_each_line(text, [&](std::size_t line_no, const std::vector<Token>& tokens) {
    if (tokens.empty()) return;
    auto loc = [&](const Token& t) { return SourceLocation{line_no, t.column}; };
    const auto& kw = tokens[0];
    auto it = keywords().find(kw.text);
    if (it == keywords().end()) {
      diags.push_back({loc(kw), "unknown keyword '" + std::string(kw.text) + "'"});
      return;
    }
    const std::size_t expected = 1 + it->second.args + (it->second.weighted ? 2 : 0);
    if (tokens.size() != expected) {
      std::string usage = std::string(kw.text) + (it->second.args == 1 ? " <name>" : " <a> <b>") +
                          (it->second.weighted ? " weight <float>" : "");
      diags.push_back({loc(kw), "expected '" + usage + "'"});
      return;
    }
    std::optional<double> weight;
    if (it->second.weighted) {
      const auto& w_kw = tokens[3];
      if (w_kw.text != "weight") {
        diags.push_back({loc(w_kw), "expected 'weight', found '" + std::string(w_kw.text) + "'"});
        return;
      }
      weight = parse_weight(tokens[4].text);
      if (!weight) {
        diags.push_back({loc(tokens[4]), "invalid weight '" + std::string(tokens[4].text) + "'"});
        return;
      }
    }

    const std::string keyword(kw.text);
    if (it->second.args == 1) {
      std::string name(tokens[1].text);
      Kind kind = keyword == "component" ? Kind::component : keyword == "risk" ? Kind::risk : Kind::type;
      auto [prev, inserted] = declared.emplace(name, std::make_pair(kind, loc(tokens[1])));
      if (!inserted) {
        diags.push_back({loc(tokens[1]), "duplicate declaration of '" + name + "' (already declared as " +
                                             kind_name(prev->second.first) + " at line " +
                                             std::to_string(prev->second.second.line) + ")"});
        return;
      }
      (kind == Kind::component ? model.components : kind == Kind::risk ? model.risks : model.types)
          .push_back(name);
      return;
    }

    std::string a(tokens[1].text), b(tokens[2].text);
    if (!statements.emplace(keyword, a, b).second) {
      diags.push_back({loc(kw), "duplicate declaration '" + keyword + " " + a + " " + b + "'"});
      return;
    }
    const SourceLocation where = loc(kw);
    if (keyword == "dependsSpecific" || keyword == "dependsGeneric" || keyword == "redundant") {
      refs.push_back({a, Kind::component, loc(tokens[1])});
      refs.push_back({b, Kind::component, loc(tokens[2])});
      auto& list = keyword == "dependsSpecific"  ? model.specific_deps
                   : keyword == "dependsGeneric" ? model.generic_deps
                                                 : model.redundancy_pairs;
      list.push_back({a, b, where});
    } else if (keyword == "instanceOf") {
      refs.push_back({a, Kind::component, loc(tokens[1])});
      refs.push_back({b, Kind::type, loc(tokens[2])});
      model.type_memberships.push_back({a, b, where});
    } else if (keyword == "hasRisk") {
      refs.push_back({a, Kind::component, loc(tokens[1])});
      refs.push_back({b, Kind::risk, loc(tokens[2])});
      model.risk_capabilities.push_back({a, b, *weight, where});
    } else {
      refs.push_back({a, Kind::type, loc(tokens[1])});
      refs.push_back({b, Kind::risk, loc(tokens[2])});
      model.type_risk_rules.push_back({a, b, *weight, where});
    }
  });

  for (const auto& r : refs) {
    auto it = declared.find(r.name);
    if (it == declared.end()) {
      diags.push_back({r.where, std::string("undeclared ") + kind_name(r.kind) + " '" + r.name + "'"});
    } else if (it->second.first != r.kind) {
      diags.push_back({r.where, "'" + r.name + "' is a " + kind_name(it->second.first) + ", expected a " +
                                    kind_name(r.kind)});
    }
  }

  if (!diags.empty()) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& x, const Diagnostic& y) {
      return std::tie(x.where.line, x.where.column) < std::tie(y.where.line, y.where.column);
    });
    throw ParseError(std::move(source), std::move(diags));
  }
  return model;
}

InfrastructureModel load_model_file(const std::string& path) { return parse_model(read_file(path), path); }

std::string to_dsl(const InfrastructureModel& m) {
  std::string out;
  for (const auto& c : m.components) out += "component " + c + "\n";
  for (const auto& r : m.risks) out += "risk " + r + "\n";
  for (const auto& t : m.types) out += "type " + t + "\n";
  for (const auto& e : m.specific_deps) out += "dependsSpecific " + e.from + " " + e.to + "\n";
  for (const auto& e : m.generic_deps) out += "dependsGeneric " + e.from + " " + e.to + "\n";
  for (const auto& e : m.redundancy_pairs) out += "redundant " + e.from + " " + e.to + "\n";
  for (const auto& t : m.type_memberships) out += "instanceOf " + t.component + " " + t.type + "\n";
  for (const auto& c : m.risk_capabilities)
    out += "hasRisk " + c.component + " " + c.risk + " weight " + mln::format_weight(c.weight) + "\n";
  for (const auto& r : m.type_risk_rules)
    out += "typeRisk " + r.type + " " + r.risk + " weight " + mln::format_weight(r.weight) + "\n";
  return out;
}

std::vector<ObservedStatus> parse_observations(std::string_view text, std::string source) {
  std::vector<ObservedStatus> out;
  std::vector<Diagnostic> diags;
  for_each_line(text, [&](std::size_t line_no, const std::vector<Token>& tokens) {
    if (tokens.empty()) return;
    auto loc = [&](const Token& t) { return SourceLocation{line_no, t.column}; };
    if (tokens[0].text != "observe") {
      diags.push_back({loc(tokens[0]), "unknown keyword '" + std::string(tokens[0].text) + "'"});
      return;
    }
    if (tokens.size() != 3) {
      diags.push_back({loc(tokens[0]), "expected 'observe available|unavailable <component>'"});
      return;
    }
    const auto status = tokens[1].text;
    if (status != "available" && status != "unavailable") {
      diags.push_back({loc(tokens[1]), "expected 'available' or 'unavailable', found '" + std::string(status) + "'"});
      return;
    }
    out.push_back({std::string(tokens[2].text), status == "available", loc(tokens[2])});
  });
  if (!diags.empty()) throw ParseError(std::move(source), std::move(diags));
  return out;
}

std::vector<ObservedStatus> load_observation_file(const std::string& path) {
  return parse_observations(read_file(path), path);
}

}  // namespace rca::model
