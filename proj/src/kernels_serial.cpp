// Reference implementations: straightforward ordered-map accumulation with
// no interning and no threads.

#include <map>
#include <utility>

#include "monoslicer/kernels.hpp"

namespace monoslicer::kernels::serial {

PathFrequencyTable count_paths(std::span<const ExecutionTrace> traces) {
  std::map<PathSignature, std::uint64_t> counts;
  for (const auto& t : traces) ++counts[PathSignature{t.events}];
  std::vector<PathRow> rows;
  for (auto& [sig, f] : counts) rows.push_back({sig, f});
  return PathFrequencyTable::from_rows(std::move(rows));
}

CallGraph directly_follows(const PathFrequencyTable& table) {
  std::map<std::pair<NodeRef, NodeRef>, std::uint64_t> weights;
  std::vector<NodeRef> nodes;
  for (const auto& row : table.rows()) {
    const auto& seq = row.signature.sequence;
    nodes.insert(nodes.end(), seq.begin(), seq.end());
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) weights[{seq[i], seq[i + 1]}] += row.frequency;
  }
  std::vector<CallEdge> edges;
  for (auto& [key, w] : weights)
    if (w > 0) edges.push_back({key.first, key.second, w});
  return CallGraph::from_parts(std::move(nodes), std::move(edges));
}

decompose::Classification classify(const ClassGraph& g, const Decomposition& d) {
  decompose::Classification out;
  for (const auto& e : g.edges()) {
    const std::string* source_service = nullptr;
    const std::string* target_service = nullptr;
    const std::string* shared = nullptr;
    for (const auto& [name, members] : d.assignment) {
      const bool has_source = members.count(e.source) > 0;
      const bool has_target = members.count(e.target) > 0;
      if (has_source && !source_service) source_service = &name;
      if (has_target && !target_service) target_service = &name;
      if (has_source && has_target && !shared) shared = &name;
    }
    if (!source_service || !target_service) {
      const std::string& missing = source_service ? e.target : e.source;
      std::optional<std::string> from;
      if (source_service) from = *source_service;
      out.unassigned.push_back({e, missing, from});
      continue;
    }
    if (shared) {
      out.edges.push_back({e, decompose::Verdict::Internal, *shared, std::nullopt});
    } else {
      out.edges.push_back({e, decompose::Verdict::External, *source_service, *target_service});
    }
  }
  return out;
}

std::vector<metrics::Evaluation> evaluate_all(std::span<const Decomposition> decompositions, const ClassGraph& g,
                                              const metrics::MetricsOptions& opts) {
  std::vector<metrics::Evaluation> out;
  out.reserve(decompositions.size());
  for (const auto& d : decompositions) out.push_back(metrics::assemble_evaluation(g, d, classify(g, d), opts));
  return out;
}

}  // namespace monoslicer::kernels::serial
