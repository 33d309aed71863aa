#include "monoslicer/server.hpp"

#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <httplib.h>

#include "monoslicer/io.hpp"
#include "monoslicer/log.hpp"
#include "monoslicer/miner.hpp"

namespace monoslicer::server {

namespace {

struct ApiError {
  int status;
  std::string message;
  std::vector<Violation> violations;
};

Response error_response(const ApiError& e) {
  json body = {{"error", e.message}};
  if (!e.violations.empty()) {
    json arr = json::array();
    for (const auto& v : e.violations) arr.push_back(io::to_json(v));
    body["violations"] = std::move(arr);
  }
  return {e.status, std::move(body)};
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    return io::parse_json(body);
  } catch (const io::FormatError& e) {
    throw ApiError{400, e.what(), {}};
  }
}

std::string string_arg(const json& op, const char* key) {
  auto it = op.find(key);
  if (it == op.end() || !it->is_string() || it->get<std::string>().empty())
    throw ApiError{400, std::string("operation needs a non-empty string '") + key + "'", {}};
  return it->get<std::string>();
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string part;
  for (char c : path) {
    if (c == '/') {
      if (!part.empty()) parts.push_back(std::move(part));
      part.clear();
    } else {
      part += c;
    }
  }
  if (!part.empty()) parts.push_back(std::move(part));
  return parts;
}

void require_known(const ClassGraph& g, const std::string& container) {
  if (!g.contains(container))
    throw ApiError{422, "edit rejected", {{Severity::Error, "unknown_container", container, "unknown container " + container}}};
}

void require_service(const Decomposition& d, const std::string& service) {
  if (!d.assignment.contains(service))
    throw ApiError{422, "edit rejected", {{Severity::Error, "unknown_service", service, "unknown service " + service}}};
}

void apply_op(Decomposition& d, const json& op, const ClassGraph& g) {
  if (!op.is_object()) throw ApiError{400, "each operation must be an object", {}};
  const std::string kind = string_arg(op, "op");
  if (kind == "assign") {
    auto container = string_arg(op, "container");
    auto service = string_arg(op, "service");
    require_known(g, container);
    for (auto& [_, members] : d.assignment) members.erase(container);
    d.assignment[service].insert(container);
  } else if (kind == "unassign") {
    auto container = string_arg(op, "container");
    if (op.contains("service")) {
      auto service = string_arg(op, "service");
      require_service(d, service);
      d.assignment[service].erase(container);
    } else {
      for (auto& [_, members] : d.assignment) members.erase(container);
    }
  } else if (kind == "duplicate") {
    auto container = string_arg(op, "container");
    require_known(g, container);
    auto it = op.find("services");
    if (it == op.end() || !it->is_array() || it->empty())
      throw ApiError{400, "duplicate needs a non-empty 'services' array", {}};
    for (const auto& s : *it) {
      if (!s.is_string() || s.get<std::string>().empty()) throw ApiError{400, "service names must be non-empty strings", {}};
      d.assignment[s.get<std::string>()].insert(container);
    }
  } else if (kind == "rename") {
    auto from = string_arg(op, "from");
    auto to = string_arg(op, "to");
    require_service(d, from);
    if (from == to) return;
    if (d.assignment.contains(to))
      throw ApiError{422, "edit rejected", {{Severity::Error, "service_exists", to, "service " + to + " already exists; use merge"}}};
    auto node = d.assignment.extract(from);
    node.key() = to;
    d.assignment.insert(std::move(node));
  } else if (kind == "merge") {
    auto from = string_arg(op, "from");
    auto into = string_arg(op, "into");
    require_service(d, from);
    require_service(d, into);
    if (from == into) return;
    d.assignment[into].merge(d.assignment[from]);
    d.assignment.erase(from);
  } else {
    throw ApiError{400, "unknown operation '" + kind + "'", {}};
  }
}

void drop_empty_services(Decomposition& d) {
  std::erase_if(d.assignment, [](const auto& kv) { return kv.second.empty(); });
}

}  // namespace

Workspace::Workspace(Analysis analysis, std::string state_file)
    : analysis_(std::move(analysis)), state_file_(std::move(state_file)) {
  if (!state_file_.empty() && std::filesystem::exists(state_file_)) load_state();
}

Response Workspace::dispatch(const Request& req) {
  try {
    const auto parts = split_path(req.path);
    if (parts.size() < 2 || parts[0] != "api") throw ApiError{404, "no such endpoint", {}};
    const auto& m = req.method;
    auto wrong_method = [] { return ApiError{405, "method not allowed", {}}; };

    if (parts.size() == 2) {
      const auto& what = parts[1];
      if (what == "graph") {
        if (m != "GET") throw wrong_method();
        return {200, io::to_json(analysis_.class_graph)};
      }
      if (what == "paths") {
        if (m != "GET") throw wrong_method();
        return get_paths(req);
      }
      if (what == "cycles") {
        if (m != "GET") throw wrong_method();
        return {200, io::to_json(analysis_.cycles)};
      }
      if (what == "candidates") {
        if (m != "GET") throw wrong_method();
        return {200, io::to_json(analysis_.candidates)};
      }
      if (what == "drafts") {
        if (m == "GET") return list_drafts();
        if (m == "POST") return create_draft(parse_body(req.body));
        throw wrong_method();
      }
      if (what == "compare") {
        if (m != "GET") throw wrong_method();
        return compare(req);
      }
      if (what == "selection") {
        if (m == "GET") return get_selection();
        if (m == "PUT") return put_selection(parse_body(req.body));
        throw wrong_method();
      }
    } else if (parts[1] == "drafts" && parts.size() == 3) {
      if (m == "GET") return get_draft(parts[2]);
      if (m == "PATCH") return patch_draft(parts[2], parse_body(req.body));
      throw wrong_method();
    } else if (parts[1] == "drafts" && parts.size() == 4 && parts[3] == "evaluate") {
      if (m != "POST") throw wrong_method();
      return evaluate_draft(parts[2]);
    }
    throw ApiError{404, "no such endpoint", {}};
  } catch (const ApiError& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    log::get()->error("{} {}: {}", req.method, req.path, e.what());
    return {500, {{"error", e.what()}}};
  }
}

Response Workspace::get_paths(const Request& req) const {
  std::size_t limit = analysis_.table.size();
  if (auto it = req.query.find("limit"); it != req.query.end()) {
    const auto& text = it->second;
    std::size_t n = 0;
    try {
      std::size_t used = 0;
      long long v = std::stoll(text, &used);
      if (used != text.size() || v < 1) throw std::invalid_argument("bad");
      n = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ApiError{400, "limit must be a positive integer", {}};
    }
    limit = n;
  }
  json rows = json::array();
  if (!analysis_.table.empty()) {
    for (const auto& row : miner::top_paths(analysis_.table, limit)) {
      json seq = json::array();
      for (const auto& n : row.signature.sequence) seq.push_back(io::to_json(n));
      rows.push_back({{"path", io::encode_path(row.signature)}, {"sequence", std::move(seq)}, {"frequency", row.frequency}});
    }
  }
  return {200,
          {{"total_paths", analysis_.table.size()},
           {"total_frequency", analysis_.table.total_frequency()},
           {"paths", std::move(rows)}}};
}

std::shared_ptr<Workspace::Draft> Workspace::find_draft(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = drafts_.find(id);
  if (it == drafts_.end()) throw ApiError{404, "unknown draft " + id, {}};
  return it->second;
}

std::optional<Decomposition> Workspace::lookup(const std::string& id, decompose::Provenance* provenance) const {
  {
    std::shared_lock lock(mu_);
    if (auto it = drafts_.find(id); it != drafts_.end()) {
      std::lock_guard draft_lock(it->second->mu);
      if (provenance) *provenance = decompose::Provenance::UserSpecified;
      return it->second->decomposition;
    }
  }
  if (const auto* c = analysis_.candidates.find(id)) {
    if (provenance) *provenance = c->provenance;
    return c->decomposition;
  }
  return std::nullopt;
}

json Workspace::draft_json(const Decomposition& d, std::uint64_t version) const {
  auto j = io::to_json(d);
  j["version"] = version;
  j["validation"] = io::to_json(validate_decomposition(d, analysis_.class_graph));
  return j;
}

Response Workspace::create_draft(const json& body) {
  if (!body.is_object()) throw ApiError{400, "body must be an object", {}};
  Decomposition d;
  if (auto it = body.find("from"); it != body.end()) {
    if (!it->is_string()) throw ApiError{400, "'from' must be a string", {}};
    auto source = lookup(it->get<std::string>(), nullptr);
    if (!source) throw ApiError{404, "unknown candidate or draft " + it->get<std::string>(), {}};
    d.assignment = source->assignment;
    d.label = source->label;
  }
  if (auto it = body.find("label"); it != body.end()) {
    if (!it->is_string()) throw ApiError{400, "'label' must be a string", {}};
    d.label = it->get<std::string>();
  }
  std::optional<std::string> wanted;
  if (auto it = body.find("id"); it != body.end()) {
    if (!it->is_string() || it->get<std::string>().empty()) throw ApiError{400, "'id' must be a non-empty string", {}};
    wanted = it->get<std::string>();
    if (wanted->find('/') != std::string::npos) throw ApiError{400, "'id' must not contain '/'", {}};
  }

  auto draft = std::make_shared<Draft>();
  {
    std::unique_lock lock(mu_);
    if (wanted) {
      if (drafts_.contains(*wanted) || analysis_.candidates.find(*wanted))
        throw ApiError{409, "id " + *wanted + " is taken", {}};
      d.id = *wanted;
    } else {
      do {
        d.id = "draft-" + std::to_string(next_draft_++);
      } while (drafts_.contains(d.id) || analysis_.candidates.find(d.id));
    }
    draft->decomposition = d;
    drafts_.emplace(d.id, draft);
  }
  save_state();
  return {201, draft_json(d, 1)};
}

Response Workspace::list_drafts() const {
  json arr = json::array();
  std::shared_lock lock(mu_);
  for (const auto& [id, draft] : drafts_) {
    std::lock_guard draft_lock(draft->mu);
    arr.push_back(draft_json(draft->decomposition, draft->version));
  }
  return {200, {{"drafts", std::move(arr)}}};
}

Response Workspace::get_draft(const std::string& id) const {
  auto draft = find_draft(id);
  std::lock_guard lock(draft->mu);
  return {200, draft_json(draft->decomposition, draft->version)};
}

Response Workspace::patch_draft(const std::string& id, const json& body) {
  auto draft = find_draft(id);
  const json* ops = &body;
  std::optional<std::uint64_t> expected;
  if (body.is_object() && body.contains("ops")) {
    ops = &body["ops"];
    if (auto it = body.find("expected_version"); it != body.end()) {
      if (!it->is_number_unsigned()) throw ApiError{400, "'expected_version' must be a non-negative integer", {}};
      expected = it->get<std::uint64_t>();
    }
  }
  std::vector<json> list;
  if (ops->is_array()) list.assign(ops->begin(), ops->end());
  else list.push_back(*ops);
  if (list.empty()) throw ApiError{400, "no operations given", {}};

  json out;
  {
    std::lock_guard lock(draft->mu);
    if (expected && *expected != draft->version)
      throw ApiError{409, "draft is at version " + std::to_string(draft->version), {}};
    Decomposition next = draft->decomposition;
    for (const auto& op : list) apply_op(next, op, analysis_.class_graph);
    drop_empty_services(next);
    auto validation = validate_decomposition(next, analysis_.class_graph);
    if (!validation.ok()) throw ApiError{422, "edit rejected", validation.errors()};
    draft->decomposition = std::move(next);
    ++draft->version;
    out = draft_json(draft->decomposition, draft->version);
  }
  save_state();
  return {200, std::move(out)};
}

Response Workspace::evaluate_draft(const std::string& id) const {
  auto draft = find_draft(id);
  Decomposition d;
  {
    std::lock_guard lock(draft->mu);
    d = draft->decomposition;
  }
  return {200, io::to_json(metrics::evaluate(analysis_.class_graph, d, analysis_.metrics))};
}

Response Workspace::compare(const Request& req) const {
  std::vector<std::string> ids;
  if (auto it = req.query.find("ids"); it != req.query.end() && !it->second.empty()) {
    std::stringstream ss(it->second);
    std::string id;
    std::set<std::string> seen;
    while (std::getline(ss, id, ',')) {
      if (id.empty()) continue;
      if (!seen.insert(id).second) throw ApiError{400, "id " + id + " listed twice", {}};
      ids.push_back(id);
    }
  } else {
    for (const auto& c : analysis_.candidates.candidates) ids.push_back(c.decomposition.id);
    std::shared_lock lock(mu_);
    for (const auto& [id, _] : drafts_) ids.push_back(id);
  }
  if (ids.empty()) throw ApiError{400, "nothing to compare", {}};

  decompose::CandidateSet set;
  for (const auto& id : ids) {
    decompose::Candidate c;
    auto d = lookup(id, &c.provenance);
    if (!d) throw ApiError{404, "unknown candidate or draft " + id, {}};
    c.decomposition = std::move(*d);
    set.candidates.push_back(std::move(c));
  }
  return {200, io::to_json(metrics::compare(set, analysis_.class_graph, analysis_.metrics))};
}

Response Workspace::put_selection(const json& body) {
  if (!body.is_object() || !body.contains("id") || !body["id"].is_string())
    throw ApiError{400, "body must be {\"id\": \"...\"}", {}};
  auto id = body["id"].get<std::string>();
  if (!lookup(id, nullptr)) throw ApiError{404, "unknown candidate or draft " + id, {}};
  {
    std::unique_lock lock(mu_);
    selection_ = id;
  }
  save_state();
  return get_selection();
}

Response Workspace::get_selection() const {
  std::optional<std::string> sel;
  bool is_draft = false;
  {
    std::shared_lock lock(mu_);
    sel = selection_;
    if (sel) is_draft = drafts_.contains(*sel);
  }
  if (!sel) return {200, {{"id", nullptr}}};
  return {200, {{"id", *sel}, {"kind", is_draft ? "draft" : "candidate"}}};
}

json Workspace::state_json() const {
  json drafts = json::array();
  std::shared_lock lock(mu_);
  for (const auto& [id, draft] : drafts_) {
    std::lock_guard draft_lock(draft->mu);
    auto j = io::to_json(draft->decomposition);
    j["version"] = draft->version;
    drafts.push_back(std::move(j));
  }
  return {{"drafts", std::move(drafts)},
          {"selection", selection_ ? json(*selection_) : json(nullptr)},
          {"next_draft", next_draft_}};
}

void Workspace::load_state() {
  const auto doc = io::parse_json(io::read_file(state_file_));
  if (!doc.is_object() || !doc.contains("drafts") || !doc["drafts"].is_array())
    throw io::FormatError("state file " + state_file_ + " has no drafts array");
  for (const auto& item : doc["drafts"]) {
    auto draft = std::make_shared<Draft>();
    draft->decomposition = io::decomposition_from_json(item);
    if (auto it = item.find("version"); it != item.end() && it->is_number_unsigned()) draft->version = it->get<std::uint64_t>();
    drafts_[draft->decomposition.id] = std::move(draft);
  }
  if (auto it = doc.find("next_draft"); it != doc.end() && it->is_number_unsigned()) next_draft_ = it->get<std::uint64_t>();
  if (auto it = doc.find("selection"); it != doc.end() && it->is_string()) {
    auto id = it->get<std::string>();
    if (drafts_.contains(id) || analysis_.candidates.find(id)) selection_ = id;
    else log::get()->warn("dropping stale selection {} from {}", id, state_file_);
  }
  log::get()->info("restored {} draft(s) from {}", drafts_.size(), state_file_);
}

void Workspace::save_state() const {
  if (state_file_.empty()) return;
  std::lock_guard lock(save_mu_);
  const auto tmp = state_file_ + ".tmp";
  io::write_file(tmp, io::dump(state_json()));
  std::filesystem::rename(tmp, state_file_);
}

struct HttpServer::Impl {
  Impl(Workspace& w, ServeOptions o) : ws(w), opts(std::move(o)) {}
  Workspace& ws;
  ServeOptions opts;
  httplib::Server http;
  bool bound = false;
};

HttpServer::HttpServer(Workspace& ws, ServeOptions opts) : impl_(std::make_unique<Impl>(ws, std::move(opts))) {
  auto& impl = *impl_;
  if (impl.opts.allow_cors)
    impl.http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                   {"Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, OPTIONS"},
                                   {"Access-Control-Allow-Headers", "Content-Type"}});
  // Regular routes rather than a pre-routing hook: httplib reads the body
  // only after pre-routing.
  auto api = [this](const httplib::Request& req, httplib::Response& res) {
    Request r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    auto out = impl_->ws.dispatch(r);
    res.status = out.status;
    res.set_content(io::dump(out.body), "application/json");
    log::get()->debug("{} {} -> {}", req.method, req.path, out.status);
  };
  const std::string pattern = "/api/.*";
  impl.http.Get(pattern, api);
  impl.http.Post(pattern, api);
  impl.http.Put(pattern, api);
  impl.http.Patch(pattern, api);
  impl.http.Delete(pattern, api);
  impl.http.Options(pattern, [this, api](const httplib::Request& req, httplib::Response& res) {
    if (impl_->opts.allow_cors) res.status = 204;
    else api(req, res);
  });
  if (!impl.opts.ui_dir.empty() && !impl.http.set_mount_point("/", impl.opts.ui_dir))
    throw std::runtime_error("cannot serve UI from " + impl.opts.ui_dir);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& impl = *impl_;
  int port = impl.opts.port;
  if (port == 0) {
    port = impl.http.bind_to_any_port(impl.opts.host);
    if (port < 0) throw std::runtime_error("cannot bind " + impl.opts.host);
  } else if (!impl.http.bind_to_port(impl.opts.host, port)) {
    throw std::runtime_error("cannot bind " + impl.opts.host + ":" + std::to_string(port));
  }
  impl.bound = true;
  return port;
}

void HttpServer::listen() {
  if (!impl_->bound) throw std::logic_error("HttpServer::listen before bind");
  impl_->http.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace monoslicer::server
