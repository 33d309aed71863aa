#pragma once

// Independent, deliberately naive reference implementations used to check
// the library. None of these share code with src/.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "monoslicer/metrics.hpp"
#include "monoslicer/model.hpp"

namespace monoslicer::oracle {

/// Adjacency as bitmasks over node indices (n <= 64), self-loops dropped.
inline std::vector<std::uint64_t> bit_adjacency(const ClassGraph& g) {
  std::vector<std::uint64_t> adj(g.nodes().size(), 0);
  for (const auto& e : g.edges())
    if (!e.self_loop()) adj[*g.index_of(e.source)] |= std::uint64_t{1} << *g.index_of(e.target);
  return adj;
}

/// Every simple cycle of length >= 2, rotated to start at its smallest
/// index, found by DFS from each start over larger vertices only. Each
/// cycle is found once; the result is sorted.
inline std::vector<std::vector<std::size_t>> simple_cycles(const std::vector<std::uint64_t>& adj) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = adj.size();
  std::vector<std::size_t> stack;
  auto dfs = [&](auto&& self, std::size_t start, std::size_t v, std::uint64_t visited) -> void {
    for (std::size_t w = start; w < n; ++w) {
      if (!((adj[v] >> w) & 1)) continue;
      if (w == start) {
        out.push_back(stack);
      } else if (!((visited >> w) & 1)) {
        stack.push_back(w);
        self(self, start, w, visited | (std::uint64_t{1} << w));
        stack.pop_back();
      }
    }
  };
  for (std::size_t s = 0; s < n; ++s) {
    stack = {s};
    dfs(dfs, s, s, std::uint64_t{1} << s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::set<std::vector<std::string>> simple_cycles(const ClassGraph& g) {
  std::set<std::vector<std::string>> out;
  for (const auto& c : simple_cycles(bit_adjacency(g))) {
    std::vector<std::string> names;
    for (auto v : c) names.push_back(g.nodes()[v].name);
    out.insert(names);
  }
  return out;
}

/// Kahn's algorithm on bitmask adjacency (n <= 64): peel vertices with no
/// remaining predecessor until none is left.
inline bool acyclic(const std::vector<std::uint64_t>& adj) {
  const std::size_t n = adj.size();
  std::uint64_t remaining = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  bool progress = true;
  while (remaining && progress) {
    progress = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (!((remaining >> v) & 1)) continue;
      bool has_pred = false;
      for (std::size_t u = 0; u < n && !has_pred; ++u)
        has_pred = ((remaining >> u) & 1) && ((adj[u] >> v) & 1);
      if (!has_pred) {
        remaining &= ~(std::uint64_t{1} << v);
        progress = true;
      }
    }
  }
  return remaining == 0;
}

/// g without the listed edges has no cycle; self-loops ignored.
inline bool acyclic_without(const ClassGraph& g, const std::vector<ClassEdge>& removed) {
  auto adj = bit_adjacency(g);
  for (const auto& e : removed) {
    auto s = g.index_of(e.source), t = g.index_of(e.target);
    if (s && t) adj[*s] &= ~(std::uint64_t{1} << *t);
  }
  return acyclic(adj);
}

inline bool acyclic_without(const ClassGraph& g, const std::vector<BreakSuggestion>& breaks) {
  std::vector<ClassEdge> removed;
  for (const auto& b : breaks) removed.push_back(b.edge);
  return acyclic_without(g, removed);
}

/// Pairwise dominance over all candidates.
inline std::vector<bool> pareto(const std::vector<metrics::Summary>& s) {
  std::vector<bool> optimal(s.size(), true);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      const auto& a = s[j];
      const auto& b = s[i];
      bool le = a.mean_cbm <= b.mean_cbm && a.max_cla <= b.max_cla &&
                a.duplicated_classes_total <= b.duplicated_classes_total && a.load <= b.load;
      bool lt = a.mean_cbm < b.mean_cbm || a.max_cla < b.max_cla ||
                a.duplicated_classes_total < b.duplicated_classes_total || a.load < b.load;
      if (le && lt) optimal[i] = false;
    }
  return optimal;
}

struct EdgeSplit {
  std::uint64_t internal = 0;
  std::uint64_t external = 0;
  std::uint64_t unassigned = 0;
  std::map<std::string, std::uint64_t> outgoing;  // external weight by source's smallest service
};

/// Edge-by-edge split following the definitions literally.
inline EdgeSplit split_edges(const ClassGraph& g, const Decomposition& d) {
  EdgeSplit out;
  auto services_of = [&](const std::string& c) {
    std::vector<std::string> s;
    for (const auto& [name, members] : d.assignment)
      if (members.contains(c)) s.push_back(name);
    return s;
  };
  for (const auto& e : g.edges()) {
    auto src = services_of(e.source);
    auto dst = services_of(e.target);
    if (src.empty() || dst.empty()) {
      out.unassigned += e.weight;
      continue;
    }
    bool shared = std::any_of(src.begin(), src.end(),
                              [&](const std::string& s) { return std::find(dst.begin(), dst.end(), s) != dst.end(); });
    if (shared) {
      out.internal += e.weight;
    } else {
      out.external += e.weight;
      out.outgoing[*std::min_element(src.begin(), src.end())] += e.weight;
    }
  }
  return out;
}

}  // namespace monoslicer::oracle
