#include "monoslicer/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace monoslicer {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::ClassMethod: return "class_method";
    case NodeKind::DataStore: return "data_store";
    case NodeKind::EntryPoint: return "entry_point";
  }
  return "class_method";
}

NodeKind node_kind_from_string(std::string_view text) {
  if (text == "class_method") return NodeKind::ClassMethod;
  if (text == "data_store") return NodeKind::DataStore;
  if (text == "entry_point") return NodeKind::EntryPoint;
  throw std::invalid_argument("unknown node kind '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// PathFrequencyTable

PathFrequencyTable PathFrequencyTable::from_rows(std::vector<PathRow> rows) {
  for (const auto& r : rows)
    if (r.signature.sequence.empty()) throw std::invalid_argument("empty path signature");
  std::sort(rows.begin(), rows.end(), [](const PathRow& a, const PathRow& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.signature < b.signature;
  });
  // Equal signatures sort next to each other only when frequencies match, so
  // check distinctness on a separate ordering.
  std::vector<const PathSignature*> sigs;
  sigs.reserve(rows.size());
  for (const auto& r : rows) sigs.push_back(&r.signature);
  std::sort(sigs.begin(), sigs.end(), [](auto* a, auto* b) { return *a < *b; });
  for (std::size_t i = 1; i < sigs.size(); ++i)
    if (*sigs[i - 1] == *sigs[i]) throw std::invalid_argument("duplicate path signature in frequency table");

  PathFrequencyTable t;
  t.rows_ = std::move(rows);
  return t;
}

std::uint64_t PathFrequencyTable::total_frequency() const {
  std::uint64_t sum = 0;
  for (const auto& r : rows_) sum += r.frequency;
  return sum;
}

PathFrequencyTable merge_tables(const PathFrequencyTable& a, const PathFrequencyTable& b) {
  std::unordered_map<PathSignature, std::uint64_t> counts;
  for (const auto& r : a.rows()) counts[r.signature] += r.frequency;
  for (const auto& r : b.rows()) counts[r.signature] += r.frequency;
  std::vector<PathRow> rows;
  rows.reserve(counts.size());
  for (auto& [sig, f] : counts) rows.push_back({sig, f});
  return PathFrequencyTable::from_rows(std::move(rows));
}

// ---------------------------------------------------------------------------
// CallGraph

namespace {

template <typename Edge>
void canonicalize_edges(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.source != b.source) return a.source < b.source;
    return a.target < b.target;
  });
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].weight == 0) throw std::invalid_argument("zero-weight edge");
    if (i > 0 && edges[i - 1].source == edges[i].source && edges[i - 1].target == edges[i].target)
      throw std::invalid_argument("repeated edge");
  }
}

}  // namespace

CallGraph CallGraph::from_parts(std::vector<NodeRef> nodes, std::vector<CallEdge> edges) {
  canonicalize_edges(edges);
  for (const auto& e : edges) {
    nodes.push_back(e.source);
    nodes.push_back(e.target);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  CallGraph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  return g;
}

std::uint64_t CallGraph::total_weight() const {
  std::uint64_t sum = 0;
  for (const auto& e : edges_) sum += e.weight;
  return sum;
}

std::optional<std::uint64_t> CallGraph::weight(const NodeRef& source, const NodeRef& target) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{&source, &target},
                             [](const CallEdge& e, const auto& key) {
                               if (e.source != *key.first) return e.source < *key.first;
                               return e.target < *key.second;
                             });
  if (it != edges_.end() && it->source == source && it->target == target) return it->weight;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ClassGraph

ClassGraph ClassGraph::from_parts(std::vector<ClassNode> nodes, std::vector<ClassEdge> edges) {
  canonicalize_edges(edges);
  std::sort(nodes.begin(), nodes.end(), [](const ClassNode& a, const ClassNode& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i - 1].name == nodes[i].name) throw std::invalid_argument("repeated class node '" + nodes[i].name + "'");
  for (const auto& n : nodes)
    if (n.name.empty()) throw std::invalid_argument("empty class node name");

  std::vector<ClassNode> missing;
  auto known = [&](const std::string& name) {
    return std::binary_search(nodes.begin(), nodes.end(), ClassNode{name, NodeKind::ClassMethod},
                              [](const ClassNode& a, const ClassNode& b) { return a.name < b.name; });
  };
  for (const auto& e : edges) {
    for (const auto* name : {&e.source, &e.target})
      if (!known(*name)) missing.push_back({*name, NodeKind::ClassMethod});
  }
  if (!missing.empty()) {
    nodes.insert(nodes.end(), missing.begin(), missing.end());
    std::sort(nodes.begin(), nodes.end(), [](const ClassNode& a, const ClassNode& b) { return a.name < b.name; });
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](const ClassNode& a, const ClassNode& b) { return a.name == b.name; }),
                nodes.end());
  }

  ClassGraph g;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  return g;
}

std::uint64_t ClassGraph::total_weight() const {
  std::uint64_t sum = 0;
  for (const auto& e : edges_) sum += e.weight;
  return sum;
}

std::optional<std::size_t> ClassGraph::index_of(std::string_view name) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), name,
                             [](const ClassNode& n, std::string_view key) { return n.name < key; });
  if (it != nodes_.end() && it->name == name) return static_cast<std::size_t>(it - nodes_.begin());
  return std::nullopt;
}

NodeKind ClassGraph::kind_of(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx) throw std::out_of_range("unknown container '" + std::string(name) + "'");
  return nodes_[*idx].kind;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationResult::ok() const {
  return std::none_of(violations.begin(), violations.end(),
                      [](const Violation& v) { return v.severity == Severity::Error; });
}

std::vector<Violation> ValidationResult::errors() const {
  std::vector<Violation> out;
  for (const auto& v : violations)
    if (v.severity == Severity::Error) out.push_back(v);
  return out;
}

std::vector<Violation> ValidationResult::warnings() const {
  std::vector<Violation> out;
  for (const auto& v : violations)
    if (v.severity == Severity::Warning) out.push_back(v);
  return out;
}

ValidationResult validate_decomposition(const Decomposition& d, const ClassGraph& g) {
  ValidationResult result;
  std::vector<bool> assigned(g.nodes().size(), false);

  for (const auto& [service, containers] : d.assignment) {
    if (service.empty())
      result.violations.push_back({Severity::Error, "empty_service_name", service, "empty service name"});
    if (containers.empty())
      result.violations.push_back({Severity::Error, "empty_service", service, "empty service " + service});
    for (const auto& c : containers) {
      if (auto idx = g.index_of(c)) {
        assigned[*idx] = true;
      } else {
        result.violations.push_back({Severity::Error, "unknown_container", c, "unknown container " + c});
      }
    }
  }
  for (std::size_t i = 0; i < assigned.size(); ++i) {
    if (!assigned[i]) {
      const auto& name = g.nodes()[i].name;
      result.violations.push_back({Severity::Warning, "unassigned", name, "unassigned: " + name});
    }
  }
  return result;
}

}  // namespace monoslicer

namespace {

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace

std::size_t std::hash<monoslicer::NodeRef>::operator()(const monoslicer::NodeRef& n) const noexcept {
  std::size_t seed = std::hash<std::string>{}(n.container);
  hash_combine(seed, std::hash<std::string>{}(n.member));
  hash_combine(seed, static_cast<std::size_t>(n.kind));
  return seed;
}

std::size_t std::hash<monoslicer::PathSignature>::operator()(const monoslicer::PathSignature& p) const noexcept {
  std::size_t seed = p.sequence.size();
  std::hash<monoslicer::NodeRef> h;
  for (const auto& n : p.sequence) hash_combine(seed, h(n));
  return seed;
}
