#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "monoslicer/model.hpp"

namespace monoslicer::graphops {

/// Sums method-level edge weights per container pair. Conserves total weight.
ClassGraph to_class_graph(const CallGraph& g);

/// Method-level view in ClassGraph form: every method becomes its own node,
/// named by NodeRef::display().
ClassGraph to_method_graph(const CallGraph& g);

inline constexpr std::size_t kDefaultMaxCycles = 100;

/// Strongly connected components (size >= 2), self-loops, simple cycles up
/// to max_cycles, and a set of break edges whose removal leaves the graph
/// acyclic (self-loops aside).
CycleReport find_cycles(const ClassGraph& g, std::size_t max_cycles = kDefaultMaxCycles);

/// Components of size >= 2 in canonical order (members sorted, components
/// sorted by first member).
std::vector<std::vector<std::string>> strongly_connected_components(const ClassGraph& g);

/// True when no cycle of length >= 2 exists. Self-loops are ignored.
bool is_acyclic(const ClassGraph& g);

/// Copy of g with the given edges (matched by source/target) removed.
ClassGraph remove_edges(const ClassGraph& g, const std::vector<ClassEdge>& edges);

std::string render_cycle_report(const CycleReport& report);

struct DotOptions {
  std::string graph_name = "g";
};

std::string export_dot(const CallGraph& g, const DotOptions& opts = {});
std::string export_dot(const ClassGraph& g, const DotOptions& opts = {});

}  // namespace monoslicer::graphops
