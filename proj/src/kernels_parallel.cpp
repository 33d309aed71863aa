#include <algorithm>
#include <cstddef>
#include <exception>
#include <unordered_map>

#include <omp.h>

#include "monoslicer/kernels.hpp"

namespace monoslicer::kernels {

namespace {

struct SequenceHash {
  std::size_t operator()(const std::vector<NodeRef>* seq) const noexcept {
    // Same mixing as std::hash<PathSignature>, without building a signature.
    std::size_t seed = seq->size();
    std::hash<NodeRef> h;
    for (const auto& n : *seq) seed ^= h(n) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
};

struct SequenceEq {
  bool operator()(const std::vector<NodeRef>* a, const std::vector<NodeRef>* b) const { return *a == *b; }
};

using SequenceCounts = std::unordered_map<const std::vector<NodeRef>*, std::uint64_t, SequenceHash, SequenceEq>;

std::uint64_t edge_key(std::uint32_t source, std::uint32_t target) {
  return (static_cast<std::uint64_t>(source) << 32) | target;
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

PathFrequencyTable count_paths(std::span<const ExecutionTrace> traces) {
  const auto n = static_cast<std::ptrdiff_t>(traces.size());
  std::vector<SequenceCounts> locals(static_cast<std::size_t>(omp_get_max_threads()));

#pragma omp parallel
  {
    auto& local = locals[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) ++local[&traces[static_cast<std::size_t>(i)].events];
  }

  SequenceCounts merged;
  for (auto& local : locals)
    for (auto& [seq, f] : local) merged[seq] += f;

  std::vector<PathRow> rows;
  rows.reserve(merged.size());
  for (auto& [seq, f] : merged) rows.push_back({PathSignature{*seq}, f});
  return PathFrequencyTable::from_rows(std::move(rows));
}

CallGraph directly_follows(const PathFrequencyTable& table) {
  // Intern nodes so the hot loop hashes integers only.
  std::vector<NodeRef> nodes;
  for (const auto& row : table.rows())
    nodes.insert(nodes.end(), row.signature.sequence.begin(), row.signature.sequence.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  const auto& rows = table.rows();
  const auto n_rows = static_cast<std::ptrdiff_t>(rows.size());
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> locals(
      static_cast<std::size_t>(omp_get_max_threads()));

#pragma omp parallel
  {
    auto& local = locals[static_cast<std::size_t>(omp_get_thread_num())];
    std::vector<std::uint32_t> ids;
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t r = 0; r < n_rows; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      const auto& seq = row.signature.sequence;
      ids.resize(seq.size());
      for (std::size_t i = 0; i < seq.size(); ++i)
        ids[i] = static_cast<std::uint32_t>(std::lower_bound(nodes.begin(), nodes.end(), seq[i]) - nodes.begin());
      for (std::size_t i = 0; i + 1 < ids.size(); ++i) local[edge_key(ids[i], ids[i + 1])] += row.frequency;
    }
  }

  std::unordered_map<std::uint64_t, std::uint64_t> merged;
  for (auto& local : locals)
    for (auto& [k, w] : local) merged[k] += w;

  std::vector<CallEdge> edges;
  edges.reserve(merged.size());
  for (auto& [k, w] : merged) {
    if (w == 0) continue;
    edges.push_back({nodes[k >> 32], nodes[k & 0xffffffffULL], w});
  }
  return CallGraph::from_parts(std::move(nodes), std::move(edges));
}

decompose::Classification classify(const ClassGraph& g, const Decomposition& d) {
  // membership[node] = ascending indices into the (name-ordered) service list
  std::vector<const std::string*> services;
  std::vector<std::vector<std::uint32_t>> membership(g.nodes().size());
  for (const auto& [name, members] : d.assignment) {
    const auto s = static_cast<std::uint32_t>(services.size());
    services.push_back(&name);
    for (const auto& c : members)
      if (auto idx = g.index_of(c)) membership[*idx].push_back(s);
  }

  const auto& edges = g.edges();
  const auto n = static_cast<std::ptrdiff_t>(edges.size());
  constexpr std::uint32_t kNone = ~0u;
  struct Slot {
    bool assigned = false;
    bool internal = false;
    std::uint32_t first = kNone;   // credited / source service, or source service of an unassigned edge
    std::uint32_t second = kNone;  // target service (External)
  };
  std::vector<Slot> slots(edges.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& e = edges[static_cast<std::size_t>(i)];
    const auto& src = membership[*g.index_of(e.source)];
    const auto& dst = membership[*g.index_of(e.target)];
    Slot& slot = slots[static_cast<std::size_t>(i)];
    if (src.empty() || dst.empty()) {
      slot.first = src.empty() ? kNone : src.front();
      continue;
    }
    slot.assigned = true;
    auto a = src.begin();
    auto b = dst.begin();
    while (a != src.end() && b != dst.end()) {
      if (*a == *b) {
        slot.internal = true;
        slot.first = *a;
        break;
      }
      if (*a < *b) ++a; else ++b;
    }
    if (!slot.internal) {
      slot.first = src.front();
      slot.second = dst.front();
    }
  }

  decompose::Classification out;
  out.edges.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    const Slot& s = slots[i];
    if (!s.assigned) {
      std::optional<std::string> from;
      if (s.first != kNone) from = *services[s.first];
      out.unassigned.push_back({e, s.first != kNone ? e.target : e.source, from});
    } else if (s.internal) {
      out.edges.push_back({e, decompose::Verdict::Internal, *services[s.first], std::nullopt});
    } else {
      out.edges.push_back({e, decompose::Verdict::External, *services[s.first], *services[s.second]});
    }
  }
  return out;
}

std::vector<metrics::Evaluation> evaluate_all(std::span<const Decomposition> decompositions, const ClassGraph& g,
                                              const metrics::MetricsOptions& opts) {
  const auto n = static_cast<std::ptrdiff_t>(decompositions.size());
  std::vector<metrics::Evaluation> out(decompositions.size());
  std::vector<std::exception_ptr> failures(decompositions.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = metrics::evaluate(g, decompositions[k], opts);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

}  // namespace monoslicer::kernels
