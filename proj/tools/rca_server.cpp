#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rca/server.hpp"

namespace {
rca::server::HttpServer* running = nullptr;
void on_signal(int) {
  if (running) running->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTTP service for diagnosis sessions", "rca-server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string journal;
  std::vector<std::string> model_paths;
  app.add_option("--host", host, "Address to listen on");
  app.add_option("--port", port, "Port (0 picks a free one)");
  app.add_option("--journal", journal, "Journal file; replayed at startup");
  app.add_option("--model", model_paths, "Model file to load at startup; its id is the file stem");
  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<std::filesystem::path> journal_path;
    if (!journal.empty()) journal_path = journal;
    rca::server::SessionStore store(journal_path);
    for (const auto& path : model_paths) {
      std::ifstream in(path);
      if (!in) throw rca::Error("cannot open '" + path + "'");
      std::ostringstream text;
      text << in.rdbuf();
      auto stored = store.load_model(text.str(), std::filesystem::path(path).stem().string());
      std::cerr << "model " << stored->id << ": " << stored->compiled->model.components.size() << " components\n";
    }

    rca::server::HttpServer server(store);
    running = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    bool ok = false;
    if (port == 0) {
      port = server.bind_to_any_port(host);
      std::cerr << "listening on " << host << ":" << port << '\n';
      ok = port > 0 && server.listen_after_bind();
    } else {
      std::cerr << "listening on " << host << ":" << port << '\n';
      ok = server.listen(host, port);
    }
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
