#include <cstdio>
#include <random>

#include "rca/server.hpp"

namespace rca::server {

struct SessionStore::Session {
  Session(std::string id, std::string model_id, std::shared_ptr<const session::CompiledModel> compiled)
      : id(std::move(id)), model_id(std::move(model_id)), state(std::move(compiled)) {}

  std::string id;
  std::string model_id;
  std::mutex mutex;
  session::DiagnosisSession state;
  std::map<std::size_t, std::pair<std::size_t, json>> cache;  ///< k -> (log size, report)
  std::vector<json> history;
};

std::string random_id() {
  thread_local std::mt19937_64 rng{[] {
    std::random_device rd;
    return (std::uint64_t(rd()) << 32) ^ rd();
  }()};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

namespace {

json report_document(const session::DiagnosisSession& s, std::size_t log_size, std::size_t k) {
  session::DiagnosisSession prefix(s.compiled_ptr());
  prefix.add_observations({s.log().begin(), s.log().begin() + static_cast<std::ptrdiff_t>(log_size)});
  session::DiagnoseOptions options;
  options.k = k;
  return session::to_json(prefix.compute(options));
}

}  // namespace

SessionStore::SessionStore(std::optional<std::filesystem::path> journal) {
  if (!journal) return;
  if (std::filesystem::exists(*journal)) replay(*journal);
  journal_.open(*journal, std::ios::app);
  if (!journal_) throw Error("cannot open journal '" + journal->string() + "'");
}

SessionStore::~SessionStore() = default;

void SessionStore::append(const json& event) {
  if (replaying_ || !journal_.is_open()) return;
  std::lock_guard lock(journal_mutex_);
  journal_ << event.dump() << '\n';
  journal_.flush();
}

std::shared_ptr<const StoredModel> SessionStore::insert_model(const std::string& text, const std::string& id) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = models_.find(id); it != models_.end()) {
      if (it->second->text != text) throw BadRequest("model id '" + id + "' is already taken");
      return it->second;
    }
  }
  auto parsed = model::parse_model(text, id);
  auto warnings = model::validate_model(parsed);
  auto stored = std::make_shared<StoredModel>();
  stored->id = id;
  stored->text = text;
  stored->compiled = session::compile_model(std::move(parsed));
  stored->warnings = std::move(warnings);

  std::unique_lock lock(mutex_);
  auto [it, inserted] = models_.emplace(id, stored);
  if (!inserted) {
    if (it->second->text != text) throw BadRequest("model id '" + id + "' is already taken");
    return it->second;
  }
  lock.unlock();
  append({{"event", "model_loaded"}, {"id", id}, {"text", text}});
  return stored;
}

std::shared_ptr<const StoredModel> SessionStore::load_model(const std::string& text, std::optional<std::string> id) {
  return insert_model(text, id ? *id : random_id());
}

std::shared_ptr<const StoredModel> SessionStore::model(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = models_.find(id);
  if (it == models_.end()) throw NotFound("unknown model '" + id + "'");
  return it->second;
}

std::vector<std::string> SessionStore::model_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : models_) ids.push_back(id);
  return ids;
}

std::string SessionStore::insert_session(const std::string& id, const std::string& model_id) {
  auto m = model(model_id);
  auto s = std::make_shared<Session>(id, model_id, m->compiled);
  {
    std::unique_lock lock(mutex_);
    if (!sessions_.emplace(id, s).second) throw Error("duplicate session id '" + id + "'");
  }
  append({{"event", "session_created"}, {"id", id}, {"model", model_id}});
  return id;
}

std::string SessionStore::create_session(const std::string& model_id) { return insert_session(random_id(), model_id); }

std::vector<std::string> SessionStore::session_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

std::shared_ptr<SessionStore::Session> SessionStore::find_session(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + id + "'");
  return it->second;
}

std::vector<session::Observation> SessionStore::post_observations(
    const std::string& session_id, const std::vector<session::Observation>& observations) {
  auto s = find_session(session_id);
  std::lock_guard lock(s->mutex);
  s->state.add_observations(observations);
  if (!observations.empty()) {
    json list = json::array();
    for (const auto& o : observations) list.push_back(session::to_json(o));
    append({{"event", "observations_added"}, {"session", session_id}, {"observations", list}});
  }
  return s->state.log();
}

json SessionStore::diagnosis(const std::string& session_id, std::size_t k) {
  if (k == 0) throw BadRequest("k must be positive");
  auto s = find_session(session_id);
  std::unique_lock lock(s->mutex);
  const std::size_t log_size = s->state.log().size();
  if (auto it = s->cache.find(k); it != s->cache.end() && it->second.first == log_size) return it->second.second;
  session::DiagnosisSession snapshot = s->state;
  lock.unlock();

  // Solve outside the session lock so posts are not held up.
  json report = report_document(snapshot, log_size, k);

  lock.lock();
  if (s->state.log().size() == log_size) s->cache[k] = {log_size, report};
  s->history.push_back({{"k", k}, {"logSize", log_size}, {"report", report}});
  append({{"event", "diagnosis_computed"}, {"session", session_id}, {"k", k}, {"logSize", log_size}});
  return report;
}

json SessionStore::session_document(const std::string& session_id) const {
  auto s = find_session(session_id);
  std::lock_guard lock(s->mutex);
  json log = json::array();
  for (const auto& o : s->state.log()) log.push_back(session::to_json(o));
  return {{"id", s->id}, {"model", s->model_id}, {"log", log}, {"history", s->history}};
}

void SessionStore::replay(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read journal '" + path.string() + "'");
  replaying_ = true;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json e = json::parse(line);
      const auto event = e.at("event").get<std::string>();
      if (event == "model_loaded") {
        insert_model(e.at("text").get<std::string>(), e.at("id").get<std::string>());
      } else if (event == "session_created") {
        insert_session(e.at("id").get<std::string>(), e.at("model").get<std::string>());
      } else if (event == "observations_added") {
        std::vector<session::Observation> obs;
        for (const auto& o : e.at("observations")) obs.push_back(session::observation_from_json(o));
        post_observations(e.at("session").get<std::string>(), obs);
      } else if (event == "diagnosis_computed") {
        auto s = find_session(e.at("session").get<std::string>());
        const auto k = e.at("k").get<std::size_t>();
        const auto log_size = e.at("logSize").get<std::size_t>();
        if (log_size > s->state.log().size()) throw Error("diagnosis refers to observations not in the log");
        json report = report_document(s->state, log_size, k);
        if (log_size == s->state.log().size()) s->cache[k] = {log_size, report};
        s->history.push_back({{"k", k}, {"logSize", log_size}, {"report", report}});
      } else {
        throw Error("unknown event '" + event + "'");
      }
    }
  } catch (const std::exception& ex) {
    replaying_ = false;
    throw Error(path.string() + ":" + std::to_string(line_no) + ": journal replay failed: " + ex.what());
  }
  replaying_ = false;
}

}  // namespace rca::server
