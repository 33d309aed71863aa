#include "monoslicer/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "monoslicer/graphops.hpp"
#include "monoslicer/ingest.hpp"

namespace monoslicer::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw FormatError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw FormatError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t weight_field(const json& j) {
  const auto& v = field(j, "weight");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw FormatError("field 'weight' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

const json& array_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array()) throw FormatError(std::string("field '") + key + "' must be an array");
  return v;
}

NodeKind kind_field(const json& j) {
  try {
    return node_kind_from_string(string_field(j, "kind"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

json optional_fixed(const std::optional<Rational>& r) { return r ? json(to_fixed(*r)) : json(nullptr); }
json optional_exact(const std::optional<Rational>& r) { return r ? json(to_exact(*r)) : json(nullptr); }

json class_edge_json(const ClassEdge& e) {
  return {{"source", e.source}, {"target", e.target}, {"weight", e.weight}};
}

json summary_json(const metrics::Summary& s) {
  return {{"mean_cbm", to_fixed(s.mean_cbm)},
          {"mean_cbm_exact", to_exact(s.mean_cbm)},
          {"max_cla", s.max_cla},
          {"duplicated_classes_total", s.duplicated_classes_total},
          {"load", to_exact(s.load)}};
}

std::string escape_part(std::string_view text, bool escape_dot) {
  std::string out;
  for (char c : text) {
    if (c == ';' || c == '\\' || (escape_dot && c == '.')) out += '\\';
    out += c;
  }
  return out;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string render_rows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (widths.size() <= i) widths.push_back(0);
      widths[i] = std::max(widths[i], row[i].size());
    }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) line += (i + 1 < row.size() ? pad(row[i], widths[i] + 2) : row[i]);
    out += line + "\n";
  }
  return out;
}

std::string metrics_block(const metrics::Evaluation& e) {
  std::vector<std::vector<std::string>> rows{{"MS", "CBM", "#Links", "#Classes", "#Dupl. Classes", "FEC"}};
  for (const auto& m : e.services)
    rows.push_back({m.service, m.cbm ? to_fixed(*m.cbm) : "n/a", std::to_string(m.links), std::to_string(m.cla),
                    std::to_string(m.dup), m.fec ? to_fixed(*m.fec) : "n/a"});
  std::string out = render_rows(rows);
  out += "internal " + std::to_string(e.system.internal_calls) + "  external " +
         std::to_string(e.system.external_calls) + "  load " + to_exact(e.system.load) + "  (external weight " +
         to_exact(e.system.external_weight) + ")\n";
  if (!e.unassigned.empty())
    out += std::to_string(e.unassigned.size()) + " edge(s) touch unassigned containers\n";
  return out;
}

std::string title(const std::string& id, const std::string& label) {
  return label.empty() ? id : id + " (" + label + ")";
}

}  // namespace

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json to_json(const NodeRef& n) {
  return {{"kind", std::string(to_string(n.kind))}, {"container", n.container}, {"member", n.member}};
}

json to_json(const std::vector<ExecutionTrace>& traces) {
  json arr = json::array();
  for (const auto& t : traces) {
    json events = json::array();
    for (const auto& n : t.events) events.push_back(to_json(n));
    arr.push_back({{"session_id", t.session_id},
                   {"first_start", ingest::format_timestamp(t.first_start)},
                   {"last_end", ingest::format_timestamp(t.last_end)},
                   {"events", std::move(events)}});
  }
  return {{"traces", std::move(arr)}};
}

json to_json(const CallGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes()) nodes.push_back(to_json(n));
  json edges = json::array();
  for (const auto& e : g.edges())
    edges.push_back({{"source", to_json(e.source)}, {"target", to_json(e.target)}, {"weight", e.weight}});
  return {{"type", "call_graph"}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json to_json(const ClassGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes()) nodes.push_back({{"name", n.name}, {"kind", std::string(to_string(n.kind))}});
  json edges = json::array();
  for (const auto& e : g.edges()) {
    auto j = class_edge_json(e);
    j["self_loop"] = e.self_loop();
    edges.push_back(std::move(j));
  }
  return {{"type", "class_graph"}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json to_json(const CycleReport& r) {
  json breaks = json::array();
  for (const auto& b : r.suggested_breaks) breaks.push_back({{"edge", class_edge_json(b.edge)}, {"rationale", b.rationale}});
  return {{"sccs", r.sccs},
          {"self_loops", r.self_loops},
          {"cycles", r.cycles},
          {"truncated", r.truncated},
          {"suggested_breaks", std::move(breaks)}};
}

json to_json(const Decomposition& d) {
  json services = json::object();
  for (const auto& [name, members] : d.assignment) services[name] = json(std::vector<std::string>(members.begin(), members.end()));
  return {{"id", d.id}, {"label", d.label}, {"services", std::move(services)}};
}

json to_json(const std::vector<Decomposition>& ds) {
  json arr = json::array();
  for (const auto& d : ds) arr.push_back(to_json(d));
  return arr;
}

json to_json(const decompose::CandidateSet& c) {
  json arr = json::array();
  for (const auto& cand : c.candidates) {
    auto j = to_json(cand.decomposition);
    j["provenance"] = std::string(decompose::to_string(cand.provenance));
    arr.push_back(std::move(j));
  }
  return {{"candidates", std::move(arr)}};
}

json to_json(const ServiceMetrics& m) {
  return {{"service", m.service},
          {"cla", m.cla},
          {"links", m.links},
          {"cbm", optional_fixed(m.cbm)},
          {"cbm_exact", optional_exact(m.cbm)},
          {"dup", m.dup},
          {"external_call_instances", m.external_call_instances},
          {"fec", optional_fixed(m.fec)},
          {"fec_exact", optional_exact(m.fec)}};
}

json to_json(const SystemMetrics& m) {
  return {{"internal_calls", m.internal_calls},
          {"external_calls", m.external_calls},
          {"external_weight", to_exact(m.external_weight)},
          {"load", to_exact(m.load)},
          {"duplicated_classes_total", m.duplicated_classes_total}};
}

json to_json(const Violation& v) {
  return {{"severity", v.severity == Severity::Error ? "error" : "warning"},
          {"code", v.code},
          {"subject", v.subject},
          {"message", v.message}};
}

json to_json(const ValidationResult& v) {
  json arr = json::array();
  for (const auto& x : v.violations) arr.push_back(to_json(x));
  return {{"ok", v.ok()}, {"violations", std::move(arr)}};
}

json to_json(const metrics::Evaluation& e) {
  json services = json::array();
  for (const auto& m : e.services) services.push_back(to_json(m));
  json unassigned = json::array();
  for (const auto& u : e.unassigned)
    unassigned.push_back({{"edge", class_edge_json(u.edge)},
                          {"container", u.container},
                          {"source_service", u.source_service ? json(*u.source_service) : json(nullptr)}});
  json violations = json::array();
  for (const auto& v : e.violations) violations.push_back(to_json(v));
  return {{"id", e.id},
          {"label", e.label},
          {"services", std::move(services)},
          {"system", to_json(e.system)},
          {"unassigned", std::move(unassigned)},
          {"violations", std::move(violations)}};
}

json to_json(const std::vector<metrics::Evaluation>& es) {
  json arr = json::array();
  for (const auto& e : es) arr.push_back(to_json(e));
  return {{"evaluations", std::move(arr)}};
}

json to_json(const metrics::ComparisonReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"id", e.id},
                       {"label", e.label},
                       {"provenance", std::string(decompose::to_string(e.provenance))},
                       {"pareto_optimal", e.pareto_optimal},
                       {"summary", summary_json(e.summary)},
                       {"evaluation", to_json(e.evaluation)}});
  return {{"objectives", metrics::kObjectivesNote}, {"entries", std::move(entries)}};
}

NodeRef node_from_json(const json& j) {
  NodeRef n;
  n.kind = kind_field(j);
  n.container = string_field(j, "container");
  n.member = string_field(j, "member");
  return n;
}

std::vector<ExecutionTrace> traces_from_json(const json& j) {
  std::vector<ExecutionTrace> out;
  for (const auto& t : array_field(j, "traces")) {
    ExecutionTrace trace;
    trace.session_id = string_field(t, "session_id");
    try {
      trace.first_start = ingest::parse_timestamp(string_field(t, "first_start"), ingest::TimestampFormat::Rfc3339);
      trace.last_end = ingest::parse_timestamp(string_field(t, "last_end"), ingest::TimestampFormat::Rfc3339);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("trace ") + trace.session_id + ": " + e.what());
    }
    for (const auto& ev : array_field(t, "events")) trace.events.push_back(node_from_json(ev));
    if (trace.events.empty()) throw FormatError("trace " + trace.session_id + " has no events");
    out.push_back(std::move(trace));
  }
  return out;
}

CallGraph call_graph_from_json(const json& j) {
  std::vector<NodeRef> nodes;
  for (const auto& n : array_field(j, "nodes")) nodes.push_back(node_from_json(n));
  std::vector<CallEdge> edges;
  for (const auto& e : array_field(j, "edges"))
    edges.push_back({node_from_json(field(e, "source")), node_from_json(field(e, "target")), weight_field(e)});
  try {
    return CallGraph::from_parts(std::move(nodes), std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

ClassGraph class_graph_from_json(const json& j) {
  std::vector<ClassNode> nodes;
  for (const auto& n : array_field(j, "nodes")) nodes.push_back({string_field(n, "name"), kind_field(n)});
  std::vector<ClassEdge> edges;
  for (const auto& e : array_field(j, "edges"))
    edges.push_back({string_field(e, "source"), string_field(e, "target"), weight_field(e)});
  try {
    return ClassGraph::from_parts(std::move(nodes), std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

bool is_call_graph_document(const json& j) {
  if (!j.is_object()) return false;
  if (auto t = j.find("type"); t != j.end() && t->is_string()) return *t == "call_graph";
  for (const char* key : {"nodes", "edges"}) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_array() || it->empty()) continue;
    const auto& first = it->front();
    if (first.is_object() && (first.contains("container") || (first.contains("source") && first["source"].is_object())))
      return true;
  }
  return false;
}

ClassGraph any_graph_from_json(const json& j) {
  if (is_call_graph_document(j)) {
    return graphops::to_class_graph(call_graph_from_json(j));
  }
  return class_graph_from_json(j);
}

Decomposition decomposition_from_json(const json& j) {
  Decomposition d;
  d.id = string_field(j, "id");
  if (auto it = j.find("label"); it != j.end()) {
    if (!it->is_string()) throw FormatError("field 'label' must be a string");
    d.label = it->get<std::string>();
  }
  const auto& services = field(j, "services");
  if (!services.is_object()) throw FormatError("field 'services' must be an object");
  for (const auto& [name, members] : services.items()) {
    if (!members.is_array()) throw FormatError("service '" + name + "' must list containers in an array");
    auto& set = d.assignment[name];
    for (const auto& m : members) {
      if (!m.is_string()) throw FormatError("service '" + name + "' has a non-string container");
      set.insert(m.get<std::string>());
    }
  }
  return d;
}

decompose::CandidateSet candidate_set_from_json(const json& j) {
  decompose::CandidateSet out;
  const json* items = &j;
  if (j.is_object()) items = &array_field(j, "candidates");
  if (!items->is_array()) throw FormatError("expected a candidate set or a decomposition array");
  std::set<std::string> ids;
  for (const auto& item : *items) {
    decompose::Candidate c;
    c.decomposition = decomposition_from_json(item);
    if (auto it = item.find("provenance"); it != item.end()) {
      if (!it->is_string()) throw FormatError("field 'provenance' must be a string");
      try {
        c.provenance = decompose::provenance_from_string(it->get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
      }
    }
    if (!ids.insert(c.decomposition.id).second) throw FormatError("duplicate candidate id '" + c.decomposition.id + "'");
    out.candidates.push_back(std::move(c));
  }
  return out;
}

json parse_json(std::string_view text) {
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        keys.emplace_back();
        break;
      case json::parse_event_t::object_end:
        keys.pop_back();
        break;
      case json::parse_event_t::key:
        if (!keys.back().insert(parsed.get<std::string>()).second && duplicate.empty())
          duplicate = parsed.get<std::string>();
        break;
      default:
        break;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw FormatError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  if (!duplicate.empty()) throw FormatError("duplicate key \"" + duplicate + "\"");
  return doc;
}

std::string encode_path(const PathSignature& p) {
  std::string out;
  for (std::size_t i = 0; i < p.sequence.size(); ++i) {
    if (i) out += ';';
    out += escape_part(p.sequence[i].container, false) + "." + escape_part(p.sequence[i].member, true);
  }
  return out;
}

PathSignature decode_path(std::string_view text, const std::vector<std::string>& entrypoints) {
  // Items split on unescaped ';'; an item splits on its last unescaped '.'
  // so dotted container names such as "A.java" survive.
  PathSignature sig;
  std::string item;
  std::optional<std::size_t> dot;
  auto finish = [&] {
    if (!dot) throw FormatError("path item '" + item + "' has no container.member separator");
    NodeRef n;
    n.container = item.substr(0, *dot);
    n.member = item.substr(*dot + 1);
    if (n.container.empty() || n.member.empty()) throw FormatError("path item '" + item + "' has an empty part");
    n.kind = ingest::infer_kind(n.container, n.member, entrypoints);
    sig.sequence.push_back(std::move(n));
    item.clear();
    dot.reset();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\\') {
      if (i + 1 == text.size()) throw FormatError("dangling escape in path");
      item += text[++i];
    } else if (c == ';') {
      finish();
    } else {
      if (c == '.') dot = item.size();
      item += c;
    }
  }
  if (!item.empty() || dot) finish();
  if (sig.sequence.empty()) throw FormatError("empty path");
  return sig;
}

std::string emit_table_csv(const PathFrequencyTable& table) {
  std::string out = "path,frequency\n";
  for (const auto& row : table.rows()) out += csv_field(encode_path(row.signature)) + "," + std::to_string(row.frequency) + "\n";
  return out;
}

PathFrequencyTable parse_table_csv(std::string_view text, const std::vector<std::string>& entrypoints) {
  std::vector<PathRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    // A record ends at a newline outside quotes.
    std::string record;
    bool quoted = false;
    std::vector<std::string> fields{""};
    ++line_no;
    const std::size_t start_line = line_no;
    for (; pos < text.size(); ++pos) {
      char c = text[pos];
      if (quoted) {
        if (c == '"' && pos + 1 < text.size() && text[pos + 1] == '"') {
          fields.back() += '"';
          ++pos;
        } else if (c == '"') {
          quoted = false;
        } else {
          if (c == '\n') ++line_no;
          fields.back() += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.emplace_back();
      } else if (c == '\n') {
        ++pos;
        break;
      } else if (c != '\r') {
        fields.back() += c;
      }
    }
    if (quoted) throw FormatError("line " + std::to_string(start_line) + ": unterminated quote");
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (header) {
      header = false;
      if (fields != std::vector<std::string>{"path", "frequency"})
        throw FormatError("frequency table header must be 'path,frequency'");
      continue;
    }
    if (fields.size() != 2) throw FormatError("line " + std::to_string(start_line) + ": expected 2 fields");
    PathRow row;
    try {
      row.signature = decode_path(fields[0], entrypoints);
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(start_line) + ": " + e.what());
    }
    const auto& f = fields[1];
    if (f.empty() || !std::all_of(f.begin(), f.end(), [](unsigned char ch) { return std::isdigit(ch); }))
      throw FormatError("line " + std::to_string(start_line) + ": frequency must be a non-negative integer");
    try {
      row.frequency = std::stoull(f);
    } catch (const std::out_of_range&) {
      throw FormatError("line " + std::to_string(start_line) + ": frequency out of range");
    }
    rows.push_back(std::move(row));
  }
  if (header) throw FormatError("frequency table is empty");
  try {
    return PathFrequencyTable::from_rows(std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

std::string evaluations_csv(const std::vector<metrics::Evaluation>& es) {
  std::string out = "id,service,cla,links,cbm,dup,external_call_instances,fec\n";
  for (const auto& e : es)
    for (const auto& m : e.services)
      out += csv_field(e.id) + "," + csv_field(m.service) + "," + std::to_string(m.cla) + "," + std::to_string(m.links) +
             "," + (m.cbm ? to_fixed(*m.cbm) : "") + "," + std::to_string(m.dup) + "," +
             std::to_string(m.external_call_instances) + "," + (m.fec ? to_fixed(*m.fec) : "") + "\n";
  return out;
}

std::string evaluations_table(const std::vector<metrics::Evaluation>& es) {
  std::string out;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) out += "\n";
    out += title(es[i].id, es[i].label) + "\n" + metrics_block(es[i]);
  }
  return out;
}

std::string comparison_csv(const metrics::ComparisonReport& r) {
  std::string out =
      "id,provenance,pareto_optimal,mean_cbm,max_cla,duplicated_classes_total,load,service,cla,links,cbm,dup,"
      "external_call_instances,fec\n";
  for (const auto& e : r.entries) {
    const std::string prefix = csv_field(e.id) + "," + std::string(decompose::to_string(e.provenance)) + "," +
                               (e.pareto_optimal ? "true" : "false") + "," + to_fixed(e.summary.mean_cbm) + "," +
                               std::to_string(e.summary.max_cla) + "," +
                               std::to_string(e.summary.duplicated_classes_total) + "," + to_exact(e.summary.load);
    for (const auto& m : e.evaluation.services)
      out += prefix + "," + csv_field(m.service) + "," + std::to_string(m.cla) + "," + std::to_string(m.links) + "," +
             (m.cbm ? to_fixed(*m.cbm) : "") + "," + std::to_string(m.dup) + "," +
             std::to_string(m.external_call_instances) + "," + (m.fec ? to_fixed(*m.fec) : "") + "\n";
  }
  return out;
}

std::string comparison_table(const metrics::ComparisonReport& r) {
  std::string out = std::string(metrics::kObjectivesNote) + "\n";
  for (const auto& e : r.entries) {
    out += "\n" + title(e.id, e.label) + "  [" + std::string(decompose::to_string(e.provenance)) + "]" +
           (e.pareto_optimal ? "  pareto-optimal" : "") + "\n";
    out += metrics_block(e.evaluation);
    out += "mean_cbm " + to_fixed(e.summary.mean_cbm) + "  max_cla " + std::to_string(e.summary.max_cla) +
           "  duplicated " + std::to_string(e.summary.duplicated_classes_total) + "\n";
  }
  return out;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace monoslicer::io
