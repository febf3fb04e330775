#include <httplib.h>

#include <chrono>

#include "rca/server.hpp"

namespace rca::server {

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send(res, status, {{"error", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw BadRequest(std::string("body is not valid JSON: ") + e.what());
  }
}

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::vector<session::Observation> observations_from(const json& body) {
  const json* list = &body;
  if (body.is_object()) {
    auto it = body.find("observations");
    if (it == body.end()) throw BadRequest("expected {\"observations\": [...]}");
    list = &*it;
  }
  if (!list->is_array()) throw BadRequest("observations must be an array");
  std::vector<session::Observation> out;
  const auto stamp = now_ms();
  for (const auto& o : *list) {
    try {
      out.push_back(session::observation_from_json(o));
    } catch (const Error& e) {
      throw BadRequest(e.what());
    }
    if (!o.contains("timestamp")) out.back().timestamp_ms = stamp;
  }
  return out;
}

json log_document(const std::vector<session::Observation>& log) {
  json out = json::array();
  for (const auto& o : log) out.push_back(session::to_json(o));
  return out;
}

/// Maps the library's exceptions onto status codes.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const NotFound& e) {
      send_error(res, 404, "not-found", e.what());
    } catch (const session::ObservationConflict& e) {
      send(res, 409, session::to_json(e));
    } catch (const session::Contradiction& e) {
      send(res, 422, session::to_json(e));
    } catch (const session::UnknownComponent& e) {
      send_error(res, 400, "unknown-component", e.what());
    } catch (const model::ParseError& e) {
      json diags = json::array();
      for (const auto& d : e.diagnostics())
        diags.push_back({{"line", d.where.line}, {"column", d.where.column}, {"message", d.message}});
      send(res, 400, {{"error", "parse"}, {"message", e.what()}, {"diagnostics", diags}});
    } catch (const model::ValidationError& e) {
      send(res, 400,
           {{"error", "invalid-model"}, {"message", e.what()}, {"issues", model::validation_to_json(e.report())}});
    } catch (const Error& e) {
      send_error(res, 400, "bad-request", e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "bad-request", e.what());
    }
  };
}

}  // namespace

HttpServer::HttpServer(SessionStore& store) : store_(store), server_(std::make_unique<httplib::Server>()) {
  auto& svr = *server_;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send_error(res, 500, "internal", message);
  });
  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  svr.Post("/models", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::string text = req.body;
    if (req.get_header_value("Content-Type").rfind("application/json", 0) == 0) {
      // A JSON document is stored as its DSL rendering so the journal only
      // ever holds one format.
      text = model::to_dsl(model::model_from_json(parse_body(req)));
    }
    auto stored = store_.load_model(text);
    send(res, 201,
         {{"id", stored->id},
          {"components", stored->compiled->model.components},
          {"warnings", model::validation_to_json(stored->warnings)}});
  }));

  svr.Get(R"(/models/([^/]+)/graph)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto stored = store_.model(req.matches[1]);
    json doc = model::graph_to_json(stored->compiled->model);
    doc["id"] = stored->id;
    send(res, 200, doc);
  }));

  svr.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    json body = parse_body(req);
    if (!body.is_object() || !body.contains("model") || !body["model"].is_string())
      throw BadRequest("expected {\"model\": <model id>}");
    auto id = store_.create_session(body["model"].get<std::string>());
    send(res, 201, store_.session_document(id));
  }));

  svr.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send(res, 200, store_.session_document(req.matches[1]));
  }));

  svr.Post(R"(/sessions/([^/]+)/observations)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             auto log = store_.post_observations(req.matches[1], observations_from(parse_body(req)));
             send(res, 200, {{"log", log_document(log)}});
           }));

  svr.Get(R"(/sessions/([^/]+)/diagnosis)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::size_t k = 1;
    if (req.has_param("k")) {
      const auto text = req.get_param_value("k");
      try {
        std::size_t used = 0;
        long long v = std::stoll(text, &used);
        if (used != text.size() || v < 1 || v > 1000) throw std::invalid_argument(text);
        k = static_cast<std::size_t>(v);
      } catch (const std::logic_error&) {
        throw BadRequest("k must be an integer between 1 and 1000");
      }
    }
    send(res, 200, store_.diagnosis(req.matches[1], k));
  }));
}

HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port) { return server_->listen(host, port); }
int HttpServer::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }
bool HttpServer::listen_after_bind() { return server_->listen_after_bind(); }
void HttpServer::stop() { server_->stop(); }
void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace rca::server
