#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "monoslicer/graphops.hpp"
#include "monoslicer/io.hpp"
#include "monoslicer/miner.hpp"
#include "monoslicer/model.hpp"

namespace monoslicer::testkit {

inline std::string fixture(const std::string& name) { return std::string(MONOSLICER_FIXTURE_DIR) + "/" + name; }
inline std::string golden(const std::string& name) { return std::string(MONOSLICER_GOLDEN_DIR) + "/" + name; }

inline NodeRef method(const std::string& container, const std::string& member,
                      NodeKind kind = NodeKind::ClassMethod) {
  return {kind, container, member};
}

/// "A.a() B.c()" -> [A.a(), B.c()]
inline PathSignature path(const std::string& text) {
  PathSignature sig;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find(' ', pos);
    if (end == std::string::npos) end = text.size();
    auto item = text.substr(pos, end - pos);
    if (!item.empty()) {
      auto dot = item.find('.');
      sig.sequence.push_back(method(item.substr(0, dot), item.substr(dot + 1)));
    }
    pos = end + 1;
  }
  return sig;
}

/// The four-path worked example with a shared E.j().
inline PathFrequencyTable fig3_table() {
  return PathFrequencyTable::from_rows({{path("A.a() A.b() B.c() B.d()"), 200},
                                        {path("C.e() C.f() D.g() D.h()"), 200},
                                        {path("C.e() C.f() E.j() D.g() D.h()"), 50},
                                        {path("E.i() E.j() F.k() F.l()"), 100}});
}

inline ClassGraph fig3_graph() { return graphops::to_class_graph(miner::build_call_graph(fig3_table())); }

inline Decomposition decomposition(std::string id, std::map<std::string, std::set<std::string>> assignment) {
  return {std::move(id), "", std::move(assignment)};
}

inline Decomposition split0() { return decomposition("split0", {{"MS1", {"A", "B"}}, {"MS2", {"C", "D"}}, {"MS3", {"E", "F"}}}); }
inline Decomposition split1() {
  return decomposition("split1", {{"MS1", {"A", "B"}}, {"MS2", {"C", "D", "E"}}, {"MS3", {"E", "F"}}});
}
inline Decomposition split2() { return decomposition("split2", {{"MS1", {"A", "B"}}, {"MS2", {"C", "D", "E", "F"}}}); }

inline std::string node_name(std::size_t i) { return std::string(1, static_cast<char>('A' + i)); }

/// Random class graph on n nodes named A, B, ...; each ordered pair (self
/// loops included when allow_self) is an edge with probability p.
inline ClassGraph random_class_graph(std::mt19937_64& rng, std::size_t n, double p, bool allow_self = true,
                                     std::uint64_t max_weight = 20) {
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<std::uint64_t> weight(1, max_weight);
  std::uniform_int_distribution<int> kind(0, 5);
  std::vector<ClassNode> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    int k = kind(rng);
    nodes.push_back({node_name(i), k == 0 ? NodeKind::DataStore : k == 1 ? NodeKind::EntryPoint : NodeKind::ClassMethod});
  }
  std::vector<ClassEdge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i != j || allow_self) && coin(rng)) edges.push_back({node_name(i), node_name(j), weight(rng)});
  return ClassGraph::from_parts(std::move(nodes), std::move(edges));
}

/// Random decomposition over g's nodes: each container joins 1..max_copies
/// of k services (with probability unassigned_p it joins none).
inline Decomposition random_decomposition(std::mt19937_64& rng, const ClassGraph& g, std::size_t k,
                                          std::size_t max_copies = 1, double unassigned_p = 0.0) {
  Decomposition d;
  d.id = "rand";
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::uniform_int_distribution<std::size_t> copies(1, max_copies);
  std::bernoulli_distribution skip(unassigned_p);
  for (const auto& n : g.nodes()) {
    if (skip(rng)) continue;
    for (std::size_t c = copies(rng); c > 0; --c) d.assignment["S" + std::to_string(pick(rng))].insert(n.name);
  }
  return d;
}

inline ClassGraph scaled(const ClassGraph& g, std::uint64_t k) {
  auto edges = g.edges();
  for (auto& e : edges) e.weight *= k;
  return ClassGraph::from_parts(g.nodes(), std::move(edges));
}

}  // namespace monoslicer::testkit
