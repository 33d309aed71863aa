#include "monoslicer/graphops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace monoslicer::graphops {

namespace {

// Kind of a container that mixes member kinds.
int kind_rank(NodeKind k) {
  switch (k) {
    case NodeKind::ClassMethod: return 2;
    case NodeKind::EntryPoint: return 1;
    case NodeKind::DataStore: return 0;
  }
  return 0;
}

/// Index view of a ClassGraph without self-loops. Adjacency lists are sorted.
/// Per-vertex flags; plain bytes index faster than std::vector<bool>.
using Flags = std::vector<char>;

struct IndexGraph {
  struct Edge {
    std::size_t source;
    std::size_t target;
    std::uint64_t weight;
  };
  std::vector<std::vector<std::size_t>> adj;
  std::vector<Edge> edges;  // self-loops excluded, ordered by (source, target)

  // Nodes and edges are kept sorted by name, so edges arrive in index order
  // and sources can be matched by a forward walk.
  explicit IndexGraph(const ClassGraph& g) : adj(g.nodes().size()) {
    const auto& nodes = g.nodes();
    edges.reserve(g.edges().size());
    std::size_t s = 0;
    for (const auto& e : g.edges()) {
      while (nodes[s].name != e.source) ++s;
      if (e.self_loop()) continue;
      const std::size_t t = *g.index_of(e.target);
      adj[s].push_back(t);
      edges.push_back({s, t, e.weight});
    }
  }
};

/// Iterative Tarjan restricted to vertices with active[v]. Returns
/// components of size >= 2, members ascending. Buffers are kept between
/// calls; cycle search and break suggestion call this many times.
class Tarjan {
 public:
  const std::vector<std::vector<std::size_t>>& operator()(const std::vector<std::vector<std::size_t>>& adj,
                                                          const Flags& active) {
    const std::size_t n = adj.size();
    index_.assign(n, kUnvisited);
    low_.assign(n, 0);
    on_stack_.assign(n, false);
    stack_.clear();
    call_.clear();
    std::size_t used = 0;  // out_ entries are reused to keep their storage
    std::size_t counter = 0;

    for (std::size_t root = 0; root < n; ++root) {
      if (!active[root] || index_[root] != kUnvisited) continue;
      call_.push_back({root, 0});
      index_[root] = low_[root] = counter++;
      stack_.push_back(root);
      on_stack_[root] = true;

      while (!call_.empty()) {
        Frame& f = call_.back();
        const auto& succ = adj[f.v];
        if (f.next < succ.size()) {
          const std::size_t w = succ[f.next++];
          if (!active[w]) continue;
          if (index_[w] == kUnvisited) {
            index_[w] = low_[w] = counter++;
            stack_.push_back(w);
            on_stack_[w] = true;
            call_.push_back({w, 0});
          } else if (on_stack_[w]) {
            low_[f.v] = std::min(low_[f.v], index_[w]);
          }
          continue;
        }
        const std::size_t v = f.v;
        call_.pop_back();
        if (!call_.empty()) low_[call_.back().v] = std::min(low_[call_.back().v], low_[v]);
        if (low_[v] == index_[v]) {
          std::size_t top = stack_.size();
          while (stack_[--top] != v) {}
          if (stack_.size() - top >= 2) {
            if (used == out_.size()) out_.emplace_back();
            auto& comp = out_[used++];
            comp.assign(stack_.begin() + static_cast<std::ptrdiff_t>(top), stack_.end());
            std::sort(comp.begin(), comp.end());
          }
          for (std::size_t i = top; i < stack_.size(); ++i) on_stack_[stack_[i]] = false;
          stack_.resize(top);
        }
      }
    }
    out_.resize(used);
    std::sort(out_.begin(), out_.end());
    return out_;
  }

  /// Marks in `within` the component containing root, searching only from
  /// root. Returns false when that component is a single vertex.
  bool component_of(const std::vector<std::vector<std::size_t>>& adj, const Flags& active,
                    std::size_t root, Flags& within) {
    const std::size_t n = adj.size();
    index_.assign(n, kUnvisited);
    low_.assign(n, 0);
    on_stack_.assign(n, false);
    stack_.clear();
    call_.clear();
    within.assign(n, false);
    std::size_t counter = 0;
    call_.push_back({root, 0});
    index_[root] = low_[root] = counter++;
    stack_.push_back(root);
    on_stack_[root] = true;
    while (!call_.empty()) {
      Frame& f = call_.back();
      const auto& succ = adj[f.v];
      if (f.next < succ.size()) {
        const std::size_t w = succ[f.next++];
        if (!active[w]) continue;
        if (index_[w] == kUnvisited) {
          index_[w] = low_[w] = counter++;
          stack_.push_back(w);
          on_stack_[w] = true;
          call_.push_back({w, 0});
        } else if (on_stack_[w]) {
          low_[f.v] = std::min(low_[f.v], index_[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      call_.pop_back();
      if (!call_.empty()) low_[call_.back().v] = std::min(low_[call_.back().v], low_[v]);
      if (low_[v] == index_[v]) {
        std::size_t top = stack_.size();
        while (stack_[--top] != v) {}
        if (v == root) {
          for (std::size_t i = top; i < stack_.size(); ++i) within[stack_[i]] = true;
          return stack_.size() - top >= 2;
        }
        for (std::size_t i = top; i < stack_.size(); ++i) on_stack_[stack_[i]] = false;
        stack_.resize(top);
      }
    }
    return false;
  }

 private:
  static constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  std::vector<std::size_t> index_, low_, stack_;
  Flags on_stack_;
  std::vector<Frame> call_;
  std::vector<std::vector<std::size_t>> out_;
};

/// Johnson's elementary-circuit search from `start` inside `allowed`.
class CircuitFinder {
 public:
  CircuitFinder(const std::vector<std::vector<std::size_t>>& adj, std::size_t limit,
                std::vector<std::vector<std::size_t>>& out)
      : adj_(adj), limit_(limit), out_(out), blocked_(adj.size(), false), blocked_by_(adj.size()) {}

  bool exhausted() const { return out_.size() >= limit_; }

  void run(std::size_t start, const Flags& allowed) {
    allowed_ = &allowed;
    start_ = start;
    for (std::size_t v = 0; v < adj_.size(); ++v) {
      blocked_[v] = false;
      blocked_by_[v].clear();
    }
    circuit(start);
  }

 private:
  bool circuit(std::size_t v) {
    bool found = false;
    path_.push_back(v);
    blocked_[v] = true;
    for (std::size_t w : adj_[v]) {
      if (exhausted()) break;
      if (!(*allowed_)[w]) continue;
      if (w == start_) {
        out_.push_back(path_);
        found = true;
      } else if (!blocked_[w] && circuit(w)) {
        found = true;
      }
    }
    if (found || exhausted()) {
      unblock(v);
    } else {
      for (std::size_t w : adj_[v]) {
        auto& b = blocked_by_[w];
        if ((*allowed_)[w] && std::find(b.begin(), b.end(), v) == b.end()) b.push_back(v);
      }
    }
    path_.pop_back();
    return found;
  }

  void unblock(std::size_t u) {
    work_.assign(1, u);
    while (!work_.empty()) {
      std::size_t x = work_.back();
      work_.pop_back();
      if (!blocked_[x]) continue;
      blocked_[x] = false;
      for (std::size_t w : blocked_by_[x]) work_.push_back(w);
      blocked_by_[x].clear();
    }
  }

  const std::vector<std::vector<std::size_t>>& adj_;
  std::size_t limit_;
  std::vector<std::vector<std::size_t>>& out_;
  Flags blocked_;
  std::vector<std::vector<std::size_t>> blocked_by_;  // Johnson's B lists, tiny in practice
  std::vector<std::size_t> path_;
  std::vector<std::size_t> work_;
  const Flags* allowed_ = nullptr;
  std::size_t start_ = 0;
};

std::vector<std::vector<std::size_t>> elementary_circuits(const std::vector<std::vector<std::size_t>>& adj,
                                                          const Flags& cyclic, std::size_t limit) {
  const std::size_t n = adj.size();
  std::vector<std::vector<std::size_t>> circuits;
  CircuitFinder finder(adj, limit, circuits);
  Flags allowed = cyclic;
  Tarjan tarjan;
  Flags within;
  for (std::size_t s = 0; s < n && !finder.exhausted(); ++s) {
    if (!cyclic[s]) continue;
    // Component of s in the subgraph of vertices not yet used as a start.
    if (tarjan.component_of(adj, allowed, s, within)) finder.run(s, within);
    allowed[s] = false;
  }
  return circuits;
}

std::string quote_dot(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string_view dot_shape(NodeKind k) {
  switch (k) {
    case NodeKind::ClassMethod: return "box";
    case NodeKind::DataStore: return "cylinder";
    case NodeKind::EntryPoint: return "ellipse";
  }
  return "box";
}

std::string dot_edge(std::string_view source, std::string_view target, std::uint64_t weight) {
  char pen[32];
  std::snprintf(pen, sizeof pen, "%.2f", 1.0 + std::log(static_cast<double>(weight)));
  return "  " + quote_dot(source) + " -> " + quote_dot(target) + " [label=\"" + std::to_string(weight) +
         "\", penwidth=\"" + pen + "\"];\n";
}

std::string dot_document(const std::string& name, const std::vector<std::pair<std::string, NodeKind>>& nodes,
                         const std::vector<ClassEdge>& edges) {
  if (nodes.empty()) return "digraph " + name + " { }\n";
  std::string out = "digraph " + name + " {\n";
  for (const auto& [n, kind] : nodes) out += "  " + quote_dot(n) + " [shape=" + std::string(dot_shape(kind)) + "];\n";
  for (const auto& e : edges) out += dot_edge(e.source, e.target, e.weight);
  out += "}\n";
  return out;
}

}  // namespace

ClassGraph to_class_graph(const CallGraph& g) {
  std::map<std::string, NodeKind> kinds;
  for (const auto& n : g.nodes()) {
    auto [it, inserted] = kinds.emplace(n.container, n.kind);
    if (!inserted && kind_rank(n.kind) > kind_rank(it->second)) it->second = n.kind;
  }
  std::map<std::pair<std::string, std::string>, std::uint64_t> weights;
  for (const auto& e : g.edges()) weights[{e.source.container, e.target.container}] += e.weight;

  std::vector<ClassNode> nodes;
  for (auto& [name, kind] : kinds) nodes.push_back({name, kind});
  std::vector<ClassEdge> edges;
  for (auto& [key, w] : weights) edges.push_back({key.first, key.second, w});
  return ClassGraph::from_parts(std::move(nodes), std::move(edges));
}

ClassGraph to_method_graph(const CallGraph& g) {
  std::vector<ClassNode> nodes;
  for (const auto& n : g.nodes()) nodes.push_back({n.display(), n.kind});
  std::map<std::pair<std::string, std::string>, std::uint64_t> weights;
  for (const auto& e : g.edges()) weights[{e.source.display(), e.target.display()}] += e.weight;
  std::vector<ClassEdge> edges;
  for (auto& [key, w] : weights) edges.push_back({key.first, key.second, w});
  // Distinct NodeRefs may share a display name only when kinds differ.
  std::sort(nodes.begin(), nodes.end(), [](const ClassNode& a, const ClassNode& b) { return a.name < b.name; });
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [](const ClassNode& a, const ClassNode& b) { return a.name == b.name; }),
              nodes.end());
  return ClassGraph::from_parts(std::move(nodes), std::move(edges));
}

std::vector<std::vector<std::string>> strongly_connected_components(const ClassGraph& g) {
  IndexGraph ig(g);
  Flags active(g.nodes().size(), true);
  std::vector<std::vector<std::string>> out;
  Tarjan tarjan;
  for (const auto& comp : tarjan(ig.adj, active)) {
    std::vector<std::string> names;
    for (auto v : comp) names.push_back(g.nodes()[v].name);
    out.push_back(std::move(names));
  }
  return out;
}

bool is_acyclic(const ClassGraph& g) { return strongly_connected_components(g).empty(); }

ClassGraph remove_edges(const ClassGraph& g, const std::vector<ClassEdge>& edges) {
  std::set<std::pair<std::string, std::string>> drop;
  for (const auto& e : edges) drop.insert({e.source, e.target});
  std::vector<ClassEdge> kept;
  for (const auto& e : g.edges())
    if (!drop.count({e.source, e.target})) kept.push_back(e);
  return ClassGraph::from_parts(g.nodes(), std::move(kept));
}

CycleReport find_cycles(const ClassGraph& g, std::size_t max_cycles) {
  CycleReport report;
  const auto& nodes = g.nodes();
  const std::size_t n = nodes.size();
  IndexGraph ig(g);

  for (const auto& e : g.edges())
    if (e.self_loop()) report.self_loops.push_back(e.source);

  Flags all(n, true);
  Tarjan tarjan;
  const auto& sccs = tarjan(ig.adj, all);
  Flags cyclic(n, false);
  report.sccs.reserve(sccs.size());
  for (const auto& comp : sccs) {
    std::vector<std::string> names;
    names.reserve(comp.size());
    for (auto v : comp) {
      names.push_back(nodes[v].name);
      cyclic[v] = true;
    }
    report.sccs.push_back(std::move(names));
  }

  // Elementary circuits, grouped by their smallest vertex. One extra
  // circuit is searched for so truncation is detected exactly.
  std::vector<std::vector<std::size_t>> circuits = elementary_circuits(ig.adj, cyclic, max_cycles + 1);
  if (circuits.size() > max_cycles) {
    report.truncated = true;
    circuits.resize(max_cycles);
  }
  report.cycles.reserve(circuits.size());
  for (const auto& c : circuits) {
    std::vector<std::string> names;
    names.reserve(c.size());
    for (auto v : c) names.push_back(nodes[v].name);
    report.cycles.push_back(std::move(names));
  }

  // Break suggestions: repeatedly drop the lightest edge inside each
  // remaining component until no component is left.
  std::vector<IndexGraph::Edge> live;
  for (const auto& e : ig.edges)
    if (cyclic[e.source] && cyclic[e.target]) live.push_back(e);
  std::vector<std::vector<std::size_t>> adj(n);
  Flags in(n);
  // The first pass sees every edge among cyclic vertices, so its components
  // are the ones already in sccs.
  for (bool first = true;; first = false) {
    if (!first) {
      for (auto& succ : adj) succ.clear();
      for (const auto& e : live) adj[e.source].push_back(e.target);
    }
    const auto& comps = first ? sccs : tarjan(adj, cyclic);
    if (comps.empty()) break;
    for (const auto& comp : comps) {
      in.assign(n, false);
      for (auto v : comp) in[v] = true;
      // live is ordered by (source, target) index, i.e. by name.
      auto best = live.end();
      for (auto it = live.begin(); it != live.end(); ++it)
        if (in[it->source] && in[it->target] && (best == live.end() || it->weight < best->weight)) best = it;
      const auto [s, t, best_w] = *best;
      std::string reason;
      reason.reserve(160 + 16 * comp.size());
      reason.append("lightest dependency (weight ").append(std::to_string(best_w)).append(") inside the cycle group {");
      for (std::size_t i = 0; i < comp.size(); ++i) reason.append(i ? ", " : "").append(nodes[comp[i]].name);
      reason.append("}; discuss with the team whether to invert it, e.g. through an interface owned by ")
          .append(nodes[s].name)
          .append(" (inversion of control)");
      report.suggested_breaks.push_back({ClassEdge{nodes[s].name, nodes[t].name, best_w}, std::move(reason)});
      live.erase(best);
    }
  }
  return report;
}

std::string render_cycle_report(const CycleReport& report) {
  std::ostringstream out;
  if (report.sccs.empty()) {
    out << "No circular dependencies found.\n";
  } else {
    out << "Strongly connected groups (" << report.sccs.size() << "):\n";
    for (const auto& comp : report.sccs) {
      out << "  {";
      for (std::size_t i = 0; i < comp.size(); ++i) out << (i ? ", " : "") << comp[i];
      out << "}\n";
    }
    out << "Cycles (" << report.cycles.size() << (report.truncated ? ", truncated" : "") << "):\n";
    for (const auto& c : report.cycles) {
      out << "  ";
      for (const auto& v : c) out << v << " -> ";
      out << c.front() << "\n";
    }
    out << "Suggested breaks (advisory):\n";
    for (const auto& b : report.suggested_breaks)
      out << "  " << b.edge.source << " -> " << b.edge.target << ": " << b.rationale << "\n";
  }
  if (!report.self_loops.empty()) {
    out << "Containers calling themselves (" << report.self_loops.size() << ", not treated as cycles):";
    for (const auto& s : report.self_loops) out << " " << s;
    out << "\n";
  }
  return out.str();
}

std::string export_dot(const CallGraph& g, const DotOptions& opts) {
  std::vector<std::pair<std::string, NodeKind>> nodes;
  for (const auto& n : g.nodes()) nodes.emplace_back(n.display(), n.kind);
  std::sort(nodes.begin(), nodes.end());
  std::vector<ClassEdge> edges;
  for (const auto& e : g.edges()) edges.push_back({e.source.display(), e.target.display(), e.weight});
  std::sort(edges.begin(), edges.end(), [](const ClassEdge& a, const ClassEdge& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  });
  return dot_document(opts.graph_name, nodes, edges);
}

std::string export_dot(const ClassGraph& g, const DotOptions& opts) {
  std::vector<std::pair<std::string, NodeKind>> nodes;
  for (const auto& n : g.nodes()) nodes.emplace_back(n.name, n.kind);
  return dot_document(opts.graph_name, nodes, g.edges());
}

}  // namespace monoslicer::graphops
