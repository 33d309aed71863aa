#pragma once

// HTTP API over one loaded analysis. Workspace holds the state and answers
// requests in-process; HttpServer binds it to a socket.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "monoslicer/decompose.hpp"
#include "monoslicer/metrics.hpp"
#include "monoslicer/model.hpp"

namespace monoslicer::server {

using nlohmann::json;

/// Read-only after construction.
struct Analysis {
  std::optional<CallGraph> call_graph;
  ClassGraph class_graph;
  PathFrequencyTable table;
  CycleReport cycles;
  decompose::CandidateSet candidates;
  metrics::MetricsOptions metrics;
};

struct Request {
  std::string method;  // GET, POST, PATCH, PUT
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  json body;
};

class Workspace {
 public:
  /// Loads drafts and selection from state_file when it exists and writes
  /// them back after every change. Empty path disables persistence.
  explicit Workspace(Analysis analysis, std::string state_file = {});

  const Analysis& analysis() const { return analysis_; }

  /// Routes one /api request. Never throws.
  Response dispatch(const Request& req);

 private:
  struct Draft {
    std::mutex mu;
    Decomposition decomposition;
    std::uint64_t version = 1;
  };

  Response get_paths(const Request& req) const;
  Response create_draft(const json& body);
  Response list_drafts() const;
  Response get_draft(const std::string& id) const;
  Response patch_draft(const std::string& id, const json& body);
  Response evaluate_draft(const std::string& id) const;
  Response compare(const Request& req) const;
  Response put_selection(const json& body);
  Response get_selection() const;

  std::shared_ptr<Draft> find_draft(const std::string& id) const;
  std::optional<Decomposition> lookup(const std::string& id, decompose::Provenance* provenance) const;
  json draft_json(const Decomposition& d, std::uint64_t version) const;
  json state_json() const;
  void load_state();
  void save_state() const;

  const Analysis analysis_;
  const std::string state_file_;

  mutable std::shared_mutex mu_;  // guards drafts_, selection_, next_draft_
  std::map<std::string, std::shared_ptr<Draft>> drafts_;
  std::optional<std::string> selection_;
  std::uint64_t next_draft_ = 1;
  mutable std::mutex save_mu_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  bool allow_cors = false;
  std::string ui_dir;
};

class HttpServer {
 public:
  HttpServer(Workspace& ws, ServeOptions opts);
  ~HttpServer();

  /// Binds the socket and returns the port. Throws std::runtime_error.
  int bind();
  /// Serves until stop(). Requires bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace monoslicer::server
