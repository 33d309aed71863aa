#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "monoslicer/rational.hpp"

namespace monoslicer {

enum class NodeKind { ClassMethod, DataStore, EntryPoint };

std::string_view to_string(NodeKind kind);
/// Throws std::invalid_argument on an unknown name.
NodeKind node_kind_from_string(std::string_view text);

/// CLA counts ClassMethod containers, plus EntryPoint containers on request.
inline bool counts_as_class(NodeKind kind, bool include_entrypoints) {
  return kind == NodeKind::ClassMethod || (include_entrypoints && kind == NodeKind::EntryPoint);
}

/// A method of a class, a table of a datastore, or a handler of an entry page.
/// Identity is (container, member, kind); ordering is container, then member.
struct NodeRef {
  NodeKind kind = NodeKind::ClassMethod;
  std::string container;
  std::string member;

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
  friend std::strong_ordering operator<=>(const NodeRef& a, const NodeRef& b) {
    if (auto c = a.container <=> b.container; c != 0) return c;
    if (auto c = a.member <=> b.member; c != 0) return c;
    return a.kind <=> b.kind;
  }

  /// "A.a()", "DB.TABLE A".
  std::string display() const { return container + "." + member; }
};

/// Milliseconds since the Unix epoch. Short clock forms (HH:MM) land on day 0.
struct Timestamp {
  std::int64_t ms = 0;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

struct LogEvent {
  Timestamp start_time;
  Timestamp end_time;
  std::string session_id;
  NodeRef node;

  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

struct ExecutionTrace {
  std::string session_id;
  std::vector<NodeRef> events;
  Timestamp first_start;
  Timestamp last_end;

  friend bool operator==(const ExecutionTrace&, const ExecutionTrace&) = default;
};

struct PathSignature {
  std::vector<NodeRef> sequence;

  friend bool operator==(const PathSignature&, const PathSignature&) = default;
  friend auto operator<=>(const PathSignature& a, const PathSignature& b) {
    return std::lexicographical_compare_three_way(a.sequence.begin(), a.sequence.end(),
                                                  b.sequence.begin(), b.sequence.end());
  }
};

struct PathRow {
  PathSignature signature;
  std::uint64_t frequency = 0;

  friend bool operator==(const PathRow&, const PathRow&) = default;
};

/// Distinct execution paths with session counts, sorted by descending
/// frequency and then by signature.
class PathFrequencyTable {
 public:
  PathFrequencyTable() = default;

  /// Sorts rows into canonical order. Throws std::invalid_argument when two
  /// rows carry the same signature or a signature is empty.
  static PathFrequencyTable from_rows(std::vector<PathRow> rows);

  const std::vector<PathRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::uint64_t total_frequency() const;

  friend bool operator==(const PathFrequencyTable&, const PathFrequencyTable&) = default;

 private:
  std::vector<PathRow> rows_;
};

/// Sum of frequencies per signature.
PathFrequencyTable merge_tables(const PathFrequencyTable& a, const PathFrequencyTable& b);

struct CallEdge {
  NodeRef source;
  NodeRef target;
  std::uint64_t weight = 0;

  friend bool operator==(const CallEdge&, const CallEdge&) = default;
};

/// Frequency-weighted directly-follows graph over method-level nodes.
class CallGraph {
 public:
  CallGraph() = default;

  /// Canonicalizes node and edge order. Edge endpoints are added to the node
  /// set. Throws std::invalid_argument on zero weights or repeated edges.
  static CallGraph from_parts(std::vector<NodeRef> nodes, std::vector<CallEdge> edges);

  const std::vector<NodeRef>& nodes() const { return nodes_; }
  const std::vector<CallEdge>& edges() const { return edges_; }
  std::uint64_t total_weight() const;
  std::optional<std::uint64_t> weight(const NodeRef& source, const NodeRef& target) const;

  friend bool operator==(const CallGraph&, const CallGraph&) = default;

 private:
  std::vector<NodeRef> nodes_;
  std::vector<CallEdge> edges_;
};

struct ClassNode {
  std::string name;
  NodeKind kind = NodeKind::ClassMethod;

  friend bool operator==(const ClassNode&, const ClassNode&) = default;
};

struct ClassEdge {
  std::string source;
  std::string target;
  std::uint64_t weight = 0;

  bool self_loop() const { return source == target; }
  friend bool operator==(const ClassEdge&, const ClassEdge&) = default;
};

/// Container-level graph. Self-loops are kept and reported by self_loop().
class ClassGraph {
 public:
  ClassGraph() = default;

  /// Same canonicalization and checks as CallGraph::from_parts. Endpoints
  /// missing from `nodes` are added as ClassMethod containers.
  static ClassGraph from_parts(std::vector<ClassNode> nodes, std::vector<ClassEdge> edges);

  const std::vector<ClassNode>& nodes() const { return nodes_; }
  const std::vector<ClassEdge>& edges() const { return edges_; }
  std::uint64_t total_weight() const;

  bool contains(std::string_view name) const { return index_of(name).has_value(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  NodeKind kind_of(std::string_view name) const;

  friend bool operator==(const ClassGraph& a, const ClassGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<ClassNode> nodes_;
  std::vector<ClassEdge> edges_;
};

/// Assignment of containers to named services. A container may sit in more
/// than one service (duplication).
struct Decomposition {
  std::string id;
  std::string label;
  std::map<std::string, std::set<std::string>> assignment;

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

enum class Severity { Error, Warning };

struct Violation {
  Severity severity = Severity::Error;
  std::string code;     // unknown_container, empty_service, empty_service_name, unassigned, ...
  std::string subject;  // container or service the violation is about
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const;  // no Error-severity violations
  std::vector<Violation> errors() const;
  std::vector<Violation> warnings() const;
};

ValidationResult validate_decomposition(const Decomposition& d, const ClassGraph& g);

struct ServiceMetrics {
  std::string service;
  std::int64_t cla = 0;
  std::int64_t links = 0;
  std::optional<Rational> cbm;  // empty when cla == 0
  std::int64_t dup = 0;
  std::uint64_t external_call_instances = 0;
  std::optional<Rational> fec;  // empty when cla == 0

  bool defined() const { return cla > 0; }
  friend bool operator==(const ServiceMetrics&, const ServiceMetrics&) = default;
};

struct SystemMetrics {
  std::uint64_t internal_calls = 0;
  std::uint64_t external_calls = 0;
  Rational external_weight = 1000;
  Rational load = 0;
  std::int64_t duplicated_classes_total = 0;

  friend bool operator==(const SystemMetrics&, const SystemMetrics&) = default;
};

struct BreakSuggestion {
  ClassEdge edge;
  std::string rationale;

  friend bool operator==(const BreakSuggestion&, const BreakSuggestion&) = default;
};

struct CycleReport {
  std::vector<std::vector<std::string>> sccs;    // size >= 2, members sorted
  std::vector<std::string> self_loops;           // containers with an edge to themselves
  std::vector<std::vector<std::string>> cycles;  // simple, smallest member first
  bool truncated = false;
  std::vector<BreakSuggestion> suggested_breaks;

  friend bool operator==(const CycleReport&, const CycleReport&) = default;
};

}  // namespace monoslicer

template <>
struct std::hash<monoslicer::NodeRef> {
  std::size_t operator()(const monoslicer::NodeRef& n) const noexcept;
};

template <>
struct std::hash<monoslicer::PathSignature> {
  std::size_t operator()(const monoslicer::PathSignature& p) const noexcept;
};
