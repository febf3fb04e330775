#pragma once

// Session store with an append-only journal, and the HTTP front end over it.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "rca/serialize.hpp"

namespace httplib {
class Server;
}

namespace rca::server {

class NotFound : public Error {
 public:
  using Error::Error;
};

class BadRequest : public Error {
 public:
  using Error::Error;
};

struct StoredModel {
  std::string id;
  std::string text;
  std::shared_ptr<const session::CompiledModel> compiled;
  model::ValidationReport warnings;
};

/// Models and sessions in memory. With a journal path every mutation is
/// appended to the file as one JSON line, and an existing journal is replayed
/// on construction. Diagnoses are recomputed during replay, which the solver
/// makes deterministic.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> journal = std::nullopt);
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  /// Parses model DSL text. Without an id a random one is assigned.
  /// Loading the same id again with identical text is a no-op.
  std::shared_ptr<const StoredModel> load_model(const std::string& text, std::optional<std::string> id = std::nullopt);
  std::shared_ptr<const StoredModel> model(const std::string& id) const;
  std::vector<std::string> model_ids() const;

  std::string create_session(const std::string& model_id);
  std::vector<std::string> session_ids() const;

  /// Returns the full log after the append.
  std::vector<session::Observation> post_observations(const std::string& session_id,
                                                      const std::vector<session::Observation>& observations);

  /// Report document for the current log, cached per (log length, k).
  json diagnosis(const std::string& session_id, std::size_t k = 1);

  /// {"id", "model", "log": [...], "history": [{"k", "logSize", "report"}]}
  json session_document(const std::string& session_id) const;

 private:
  struct Session;

  std::shared_ptr<Session> find_session(const std::string& id) const;
  std::shared_ptr<const StoredModel> insert_model(const std::string& text, const std::string& id);
  std::string insert_session(const std::string& id, const std::string& model_id);
  void append(const json& event);
  void replay(const std::filesystem::path& path);

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const StoredModel>> models_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;

  std::mutex journal_mutex_;
  std::ofstream journal_;
  bool replaying_ = false;
};

/// Opaque 128-bit random token as 32 hex digits.
std::string random_id();

/// Endpoints:
///   POST /models                      model DSL (or JSON document) body
///   GET  /models/{id}/graph
///   POST /sessions                    {"model": id}
///   GET  /sessions/{id}
///   POST /sessions/{id}/observations  {"observations": [...]} or [...]
///   GET  /sessions/{id}/diagnosis?k=N
/// Errors are {"error": code, "message": text, ...} with 400, 404, 409
/// (observation conflict) or 422 (observations contradict the model).
class HttpServer {
 public:
  explicit HttpServer(SessionStore& store);
  ~HttpServer();

  bool listen(const std::string& host, int port);
  /// Binds to a free port and returns it; follow with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  SessionStore& store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace rca::server
