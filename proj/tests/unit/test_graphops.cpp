#include <gtest/gtest.h>

#include <random>

#include "monoslicer/graphops.hpp"
#include "monoslicer/io.hpp"
#include "monoslicer/miner.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace monoslicer;
using testkit::method;
using testkit::path;

namespace {

ClassGraph graph(std::vector<ClassEdge> edges) { return ClassGraph::from_parts({}, std::move(edges)); }

CallGraph random_call_graph(std::mt19937_64& rng) {
  std::vector<NodeRef> pool;
  for (char c = 'A'; c <= 'D'; ++c)
    for (const char* m : {"a()", "b()", "c()"}) pool.push_back(method(std::string(1, c), m));
  std::map<std::pair<NodeRef, NodeRef>, std::uint64_t> w;
  std::size_t n = rng() % 25;
  for (std::size_t i = 0; i < n; ++i) w[{pool[rng() % pool.size()], pool[rng() % pool.size()]}] += 1 + rng() % 100;
  std::vector<CallEdge> edges;
  for (auto& [k, v] : w) edges.push_back({k.first, k.second, v});
  return CallGraph::from_parts({}, std::move(edges));
}

std::vector<ClassEdge> break_edges(const CycleReport& r) {
  std::vector<ClassEdge> out;
  for (const auto& b : r.suggested_breaks) out.push_back(b.edge);
  return out;
}

}  // namespace

TEST(ToClassGraph, PathOneOfWorkedExample) {
  auto cg = miner::build_call_graph(PathFrequencyTable::from_rows({{path("A.a() A.b() B.c() B.d()"), 200}}));
  auto g = graphops::to_class_graph(cg);
  ASSERT_EQ(g.edges().size(), 3u);
  EXPECT_EQ(g.edges()[0], (ClassEdge{"A", "A", 200}));
  EXPECT_TRUE(g.edges()[0].self_loop());
  EXPECT_EQ(g.edges()[1], (ClassEdge{"A", "B", 200}));
  EXPECT_EQ(g.edges()[2], (ClassEdge{"B", "B", 200}));
}

TEST(ToClassGraph, EmptyAndSummation) {
  EXPECT_TRUE(graphops::to_class_graph(CallGraph{}).nodes().empty());
  auto cg = CallGraph::from_parts({}, {{method("A", "a()"), method("B", "x()"), 1}, {method("A", "b()"), method("B", "x()"), 1}});
  auto g = graphops::to_class_graph(cg);
  ASSERT_EQ(g.edges().size(), 1u);
  EXPECT_EQ(g.edges()[0], (ClassEdge{"A", "B", 2}));
}

TEST(ToClassGraph, KindPrecedence) {
  auto cg = CallGraph::from_parts({method("X", "TABLE T", NodeKind::DataStore), method("X", "run()"),
                                   method("P.jsp", "go()", NodeKind::EntryPoint), method("DB", "TABLE A", NodeKind::DataStore)},
                                  {});
  auto g = graphops::to_class_graph(cg);
  EXPECT_EQ(g.kind_of("X"), NodeKind::ClassMethod);
  EXPECT_EQ(g.kind_of("P.jsp"), NodeKind::EntryPoint);
  EXPECT_EQ(g.kind_of("DB"), NodeKind::DataStore);
}

TEST(ToClassGraph, ConservesWeight) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 300; ++round) {
    auto cg = random_call_graph(rng);
    ASSERT_EQ(graphops::to_class_graph(cg).total_weight(), cg.total_weight());
    ASSERT_EQ(graphops::to_method_graph(cg).total_weight(), cg.total_weight());
  }
}

TEST(ToMethodGraph, NamesMethods) {
  auto g = graphops::to_method_graph(miner::build_call_graph(testkit::fig3_table()));
  EXPECT_EQ(g.nodes().size(), 12u);
  EXPECT_TRUE(g.contains("E.j()"));
}

TEST(FindCycles, TwoNodeCycle) {
  auto r = graphops::find_cycles(graph({{"A", "B", 5}, {"B", "A", 2}}));
  ASSERT_EQ(r.sccs.size(), 1u);
  EXPECT_EQ(r.sccs[0], (std::vector<std::string>{"A", "B"}));
  ASSERT_EQ(r.cycles.size(), 1u);
  EXPECT_EQ(r.cycles[0], (std::vector<std::string>{"A", "B"}));
  ASSERT_EQ(r.suggested_breaks.size(), 1u);
  EXPECT_EQ(r.suggested_breaks[0].edge, (ClassEdge{"B", "A", 2}));
  EXPECT_FALSE(r.suggested_breaks[0].rationale.empty());
}

TEST(FindCycles, Dag) {
  auto r = graphops::find_cycles(graph({{"A", "B", 1}, {"B", "C", 1}}));
  EXPECT_TRUE(r.sccs.empty());
  EXPECT_TRUE(r.cycles.empty());
  EXPECT_TRUE(r.suggested_breaks.empty());
  EXPECT_FALSE(r.truncated);
}

TEST(FindCycles, SelfLoopsReportedNotBroken) {
  auto r = graphops::find_cycles(graph({{"A", "A", 9}, {"A", "B", 1}}));
  EXPECT_EQ(r.self_loops, (std::vector<std::string>{"A"}));
  EXPECT_TRUE(r.cycles.empty());
  EXPECT_TRUE(r.suggested_breaks.empty());
  EXPECT_TRUE(graphops::is_acyclic(graph({{"A", "A", 9}})));
}

TEST(FindCycles, TieBreakIsLexicographic) {
  auto r = graphops::find_cycles(graph({{"C", "A", 3}, {"A", "B", 3}, {"B", "C", 3}}));
  ASSERT_EQ(r.suggested_breaks.size(), 1u);
  EXPECT_EQ(r.suggested_breaks[0].edge, (ClassEdge{"A", "B", 3}));
}

TEST(FindCycles, Truncation) {
  // Complete digraph on 5 nodes has 84 simple cycles of length >= 2.
  std::vector<ClassEdge> edges;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) edges.push_back({testkit::node_name(i), testkit::node_name(j), 1});
  auto g = graph(edges);
  EXPECT_EQ(graphops::find_cycles(g, 1000).cycles.size(), 84u);
  auto capped = graphops::find_cycles(g, 10);
  EXPECT_TRUE(capped.truncated);
  EXPECT_EQ(capped.cycles.size(), 10u);
  auto exact = graphops::find_cycles(g, 84);
  EXPECT_FALSE(exact.truncated);
  EXPECT_TRUE(oracle::acyclic_without(g, capped.suggested_breaks));
}

TEST(FindCycles, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 rng(22);
  for (int round = 0; round < 300; ++round) {
    auto g = testkit::random_class_graph(rng, 1 + rng() % 7, 0.3);
    auto r = graphops::find_cycles(g, 100000);
    std::set<std::vector<std::string>> got(r.cycles.begin(), r.cycles.end());
    ASSERT_EQ(got.size(), r.cycles.size());
    ASSERT_EQ(got, oracle::simple_cycles(g));
    ASSERT_TRUE(oracle::acyclic_without(g, r.suggested_breaks));
    ASSERT_TRUE(graphops::is_acyclic(graphops::remove_edges(g, break_edges(r))));
    ASSERT_EQ(graphops::is_acyclic(g), oracle::acyclic_without(g, std::vector<ClassEdge>{}));
    for (const auto& b : r.suggested_breaks) {
      auto it = std::find(g.edges().begin(), g.edges().end(), b.edge);
      ASSERT_NE(it, g.edges().end());
      ASSERT_FALSE(b.edge.self_loop());
    }
  }
}

TEST(FindCycles, Deterministic) {
  std::mt19937_64 rng(23);
  auto g = testkit::random_class_graph(rng, 8, 0.35);
  EXPECT_EQ(graphops::find_cycles(g), graphops::find_cycles(g));
}

TEST(RemoveEdges, ByEndpoints) {
  auto g = graph({{"A", "B", 1}, {"B", "A", 2}});
  auto h = graphops::remove_edges(g, {{"B", "A", 999}});
  ASSERT_EQ(h.edges().size(), 1u);
  EXPECT_EQ(h.nodes().size(), 2u);
}

TEST(RenderCycleReport, Text) {
  auto text = graphops::render_cycle_report(graphops::find_cycles(graph({{"A", "B", 5}, {"B", "A", 2}})));
  EXPECT_NE(text.find("A -> B"), std::string::npos);
  EXPECT_NE(text.find("B -> A"), std::string::npos);
  EXPECT_EQ(graphops::render_cycle_report({}), "No circular dependencies found.\n");
}

TEST(ExportDot, SingleEdge) {
  auto dot = graphops::export_dot(graph({{"A", "B", 50}}));
  EXPECT_NE(dot.find("\"A\" -> \"B\" [label=\"50\""), std::string::npos);
  EXPECT_NE(dot.find("penwidth=\"4.91\""), std::string::npos);  // 1 + ln 50
  EXPECT_EQ(dot.rfind("digraph g {", 0), 0u);
}

TEST(ExportDot, Empty) {
  EXPECT_EQ(graphops::export_dot(ClassGraph{}), "digraph g { }\n");
  EXPECT_EQ(graphops::export_dot(CallGraph{}), "digraph g { }\n");
}

TEST(ExportDot, QuotesAndShapes) {
  auto g = ClassGraph::from_parts({{"DB", NodeKind::DataStore}, {"Say \"hi\"", NodeKind::EntryPoint}}, {{"Say \"hi\"", "DB", 1}});
  auto dot = graphops::export_dot(g, {"x"});
  EXPECT_NE(dot.find("digraph x {"), std::string::npos);
  EXPECT_NE(dot.find("\"Say \\\"hi\\\"\""), std::string::npos);
  EXPECT_NE(dot.find("shape=cylinder"), std::string::npos);
  EXPECT_NE(dot.find("penwidth=\"1.00\""), std::string::npos);
}

TEST(ExportDot, WorkedExampleGolden) {
  auto dot = graphops::export_dot(miner::build_call_graph(testkit::fig3_table()));
  EXPECT_EQ(dot, io::read_file(testkit::golden("fig3_calls.dot")));
  EXPECT_EQ(dot, graphops::export_dot(miner::build_call_graph(testkit::fig3_table())));
  std::size_t nodes = 0;
  for (std::size_t pos = 0; (pos = dot.find("shape=", pos)) != std::string::npos; ++pos) ++nodes;
  EXPECT_EQ(nodes, 12u);
}
