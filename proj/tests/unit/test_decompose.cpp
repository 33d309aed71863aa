#include <gtest/gtest.h>

#include <random>

#include "monoslicer/decompose.hpp"
#include "monoslicer/io.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace monoslicer;
using decompose::Verdict;

namespace {

std::uint64_t external_of(const decompose::Classification& c) { return c.external_weight(); }

Decomposition rename_services(const Decomposition& d, const std::string& prefix) {
  Decomposition out{d.id, d.label, {}};
  for (const auto& [name, members] : d.assignment) out.assignment[prefix + name] = members;
  return out;
}

}  // namespace

TEST(ClassifyEdges, Split0) {
  auto g = testkit::fig3_graph();
  auto c = decompose::classify_edges(g, testkit::split0());
  ASSERT_EQ(c.edges.size(), g.edges().size());
  for (const auto& e : c.edges) {
    bool crossing = (e.edge.source == "C" && e.edge.target == "E") || (e.edge.source == "E" && e.edge.target == "D");
    EXPECT_EQ(e.verdict, crossing ? Verdict::External : Verdict::Internal) << e.edge.source << "->" << e.edge.target;
    if (crossing) EXPECT_EQ(e.edge.weight, 50u);
  }
  EXPECT_EQ(external_of(c), 100u);
  EXPECT_EQ(c.internal_weight(), 1600u);
  EXPECT_TRUE(c.unassigned.empty());
}

TEST(ClassifyEdges, DuplicationMakesEverythingInternal) {
  auto g = testkit::fig3_graph();
  auto c = decompose::classify_edges(g, testkit::split1());
  EXPECT_EQ(external_of(c), 0u);
  for (const auto& e : c.edges)
    if (e.edge.source == "C" && e.edge.target == "E") EXPECT_EQ(e.attributed_service, "MS2");
  EXPECT_EQ(external_of(decompose::classify_edges(g, testkit::split2())), 0u);
}

TEST(ClassifyEdges, Attribution) {
  auto g = ClassGraph::from_parts({}, {{"A", "B", 3}});
  auto c = decompose::classify_edges(g, testkit::decomposition("d", {{"Z", {"A"}}, {"Y", {"A"}}, {"X", {"B"}}, {"W", {"B"}}}));
  ASSERT_EQ(c.edges.size(), 1u);
  EXPECT_EQ(c.edges[0].verdict, Verdict::External);
  EXPECT_EQ(c.edges[0].attributed_service, "Y");
  EXPECT_EQ(c.edges[0].target_service, "W");
}

TEST(ClassifyEdges, SingleServiceAllInternal) {
  auto g = testkit::fig3_graph();
  Decomposition all{"all", "", {{"S", {}}}};
  for (const auto& n : g.nodes()) all.assignment["S"].insert(n.name);
  auto c = decompose::classify_edges(g, all);
  EXPECT_EQ(c.external_weight(), 0u);
  EXPECT_EQ(c.internal_weight(), g.total_weight());
}

TEST(ClassifyEdges, UnassignedEndpointsReported) {
  auto g = ClassGraph::from_parts({}, {{"A", "B", 3}, {"B", "C", 4}});
  auto c = decompose::classify_edges(g, testkit::decomposition("d", {{"S", {"A"}}}));
  EXPECT_TRUE(c.edges.empty());
  ASSERT_EQ(c.unassigned.size(), 2u);
  EXPECT_EQ(c.unassigned[0].container, "B");
  EXPECT_EQ(c.unassigned[0].source_service, "S");
  EXPECT_FALSE(c.unassigned[1].source_service);
}

TEST(ClassifyEdgesProperties, PartitionOfWeight) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 500; ++round) {
    auto g = testkit::random_class_graph(rng, 1 + rng() % 8, 0.35);
    auto d = testkit::random_decomposition(rng, g, 1 + rng() % 4, 1 + rng() % 3, 0.1);
    auto c = decompose::classify_edges(g, d);
    auto o = oracle::split_edges(g, d);
    ASSERT_EQ(c.internal_weight(), o.internal);
    ASSERT_EQ(c.external_weight(), o.external);
    std::uint64_t unassigned = 0;
    for (const auto& u : c.unassigned) unassigned += u.edge.weight;
    ASSERT_EQ(unassigned, o.unassigned);
    ASSERT_EQ(c.internal_weight() + c.external_weight() + unassigned, g.total_weight());
  }
}

TEST(ClassifyEdgesProperties, RenamingKeepsVerdicts) {
  std::mt19937_64 rng(32);
  for (int round = 0; round < 200; ++round) {
    auto g = testkit::random_class_graph(rng, 1 + rng() % 7, 0.35);
    auto d = testkit::random_decomposition(rng, g, 1 + rng() % 4, 1);
    auto a = decompose::classify_edges(g, d);
    auto b = decompose::classify_edges(g, rename_services(d, "x_"));
    ASSERT_EQ(a.edges.size(), b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) ASSERT_EQ(a.edges[i].verdict, b.edges[i].verdict);
  }
}

TEST(ClassifyEdgesProperties, SingletonsMakeEveryCrossingExternal) {
  std::mt19937_64 rng(33);
  for (int round = 0; round < 100; ++round) {
    auto g = testkit::random_class_graph(rng, 1 + rng() % 7, 0.4);
    Decomposition d{"max", "", {}};
    for (const auto& n : g.nodes()) d.assignment[n.name] = {n.name};
    std::uint64_t self = 0;
    for (const auto& e : g.edges())
      if (e.self_loop()) self += e.weight;
    auto c = decompose::classify_edges(g, d);
    ASSERT_EQ(c.internal_weight(), self);
    ASSERT_EQ(c.external_weight(), g.total_weight() - self);
  }
}

TEST(GenerateCandidates, WorkedExample) {
  auto set = decompose::generate_candidates(testkit::fig3_graph(), testkit::fig3_table());
  ASSERT_EQ(set.candidates.size(), 4u);
  EXPECT_EQ(set.candidates[0].provenance, decompose::Provenance::BaseClustering);
  const auto* dup = set.find("dup:E");
  const auto* merge = set.find("merge:E");
  const auto* ext = set.find("ext:E");
  ASSERT_TRUE(dup && merge && ext);
  EXPECT_EQ(dup->decomposition.assignment, testkit::split1().assignment);
  EXPECT_EQ(merge->decomposition.assignment, testkit::split2().assignment);
  EXPECT_EQ(ext->decomposition.assignment, testkit::split0().assignment);
  EXPECT_EQ(dup->provenance, decompose::Provenance::DuplicateVariant);
  for (const auto& c : set.candidates) EXPECT_TRUE(validate_decomposition(c.decomposition, testkit::fig3_graph()).ok());
}

TEST(GenerateCandidates, DisjointPathsGiveOneCandidate) {
  auto table = PathFrequencyTable::from_rows({{testkit::path("A.a() B.b()"), 3}, {testkit::path("C.c() D.d()"), 5}});
  auto g = graphops::to_class_graph(miner::build_call_graph(table));
  auto set = decompose::generate_candidates(g, table);
  ASSERT_EQ(set.candidates.size(), 1u);
  EXPECT_EQ(set.candidates[0].decomposition.assignment.size(), 2u);
  EXPECT_EQ(decompose::classify_edges(g, set.candidates[0].decomposition).external_weight(), 0u);
}

TEST(GenerateCandidates, SinglePath) {
  auto table = PathFrequencyTable::from_rows({{testkit::path("A.a() B.b() C.c()"), 3}});
  auto g = graphops::to_class_graph(miner::build_call_graph(table));
  auto set = decompose::generate_candidates(g, table);
  ASSERT_EQ(set.candidates.size(), 1u);
  EXPECT_EQ(set.candidates[0].decomposition.assignment.begin()->second, (std::set<std::string>{"A", "B", "C"}));
}

TEST(GenerateCandidates, EmptyGraphThrows) {
  EXPECT_THROW(decompose::generate_candidates(ClassGraph{}, {}), decompose::EmptyGraphError);
}

TEST(GenerateCandidates, CapAndUserSpecified) {
  decompose::GenerateOptions opts;
  opts.max_candidates = 2;
  opts.user_specified = {testkit::split0()};
  auto set = decompose::generate_candidates(testkit::fig3_graph(), testkit::fig3_table(), opts);
  // User candidates come first and count toward the cap.
  ASSERT_EQ(set.candidates.size(), 2u);
  EXPECT_EQ(set.candidates[0].provenance, decompose::Provenance::UserSpecified);
  EXPECT_EQ(set.candidates[0].decomposition.id, "split0");
  EXPECT_EQ(set.candidates[1].decomposition.id, "base");

  // Generated variants equal to a user candidate are dropped.
  opts.max_candidates = 50;
  set = decompose::generate_candidates(testkit::fig3_graph(), testkit::fig3_table(), opts);
  EXPECT_EQ(set.candidates.size(), 4u);
  EXPECT_FALSE(set.find("ext:E"));

  opts.user_specified = {testkit::decomposition("bad", {{"S", {"Nope"}}})};
  EXPECT_THROW(decompose::generate_candidates(testkit::fig3_graph(), testkit::fig3_table(), opts), std::invalid_argument);
}

TEST(GenerateCandidates, Deterministic) {
  auto g = testkit::fig3_graph();
  auto t = testkit::fig3_table();
  EXPECT_EQ(decompose::generate_candidates(g, t), decompose::generate_candidates(g, t));
}

TEST(GenerateCandidates, EveryContainerCoveredOnRandomTables) {
  std::mt19937_64 rng(34);
  for (int round = 0; round < 100; ++round) {
    std::vector<PathRow> rows;
    std::set<PathSignature> seen;
    for (std::size_t r = 0, n = 1 + rng() % 5; r < n; ++r) {
      PathSignature sig;
      for (std::size_t i = 0, len = 1 + rng() % 5; i < len; ++i)
        sig.sequence.push_back(testkit::method(testkit::node_name(rng() % 8), "m()"));
      if (seen.insert(sig).second) rows.push_back({sig, 1 + rng() % 100});
    }
    auto table = PathFrequencyTable::from_rows(rows);
    auto g = graphops::to_class_graph(miner::build_call_graph(table));
    auto set = decompose::generate_candidates(g, table);
    ASSERT_FALSE(set.candidates.empty());
    std::set<std::string> ids;
    for (const auto& c : set.candidates) {
      ASSERT_TRUE(ids.insert(c.decomposition.id).second);
      auto v = validate_decomposition(c.decomposition, g);
      ASSERT_TRUE(v.ok());
      ASSERT_TRUE(v.warnings().empty()) << c.decomposition.id;
    }
  }
}

TEST(ForEachPartition, BellNumbers) {
  const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877};
  for (std::size_t n = 1; n <= 7; ++n) {
    std::vector<ClassNode> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.push_back({testkit::node_name(i), NodeKind::ClassMethod});
    auto g = ClassGraph::from_parts(nodes, {});
    std::size_t count = 0;
    std::set<std::map<std::string, std::set<std::string>>> distinct;
    decompose::for_each_partition(g, [&](const Decomposition& d) {
      ++count;
      distinct.insert(d.assignment);
      EXPECT_TRUE(validate_decomposition(d, g).violations.empty());
    });
    EXPECT_EQ(count, bell[n]);
    EXPECT_EQ(distinct.size(), bell[n]);
  }
}

TEST(ForEachPartition, TooLarge) {
  std::vector<ClassNode> nodes;
  for (std::size_t i = 0; i <= decompose::kMaxPartitionContainers; ++i) nodes.push_back({"N" + std::to_string(i), NodeKind::ClassMethod});
  EXPECT_THROW(decompose::for_each_partition(ClassGraph::from_parts(nodes, {}), [](const Decomposition&) {}),
               std::invalid_argument);
}

TEST(LoadDecompositions, Fixture) {
  auto ds = decompose::load_decompositions(io::read_file(testkit::fixture("fig3_splits.json")));
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds[1].assignment, testkit::split1().assignment);
  EXPECT_EQ(ds[0].label, "A+B, C+D, E+F");
}

TEST(LoadDecompositions, AcceptsDuplication) {
  auto ds = decompose::load_decompositions(R"([{"id":"x","services":{"MS1":["A"],"MS2":["A"]}}])");
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].assignment.size(), 2u);
}

TEST(LoadDecompositions, Errors) {
  for (const char* bad : {"not json", "{}", R"([{"id":"x","services":{}}])", R"([{"id":"x","services":{"":["A"]}}])",
                          R"([{"id":"x","services":{"S":["A"]}},{"id":"x","services":{"S":["B"]}}])",
                          R"([{"id":"x","services":{"S":["A"],"S":["B"]}}])"}) {
    EXPECT_THROW(decompose::load_decompositions(bad), decompose::DocumentError) << bad;
  }
}

TEST(Provenance, RoundTrip) {
  for (auto p : {decompose::Provenance::UserSpecified, decompose::Provenance::BaseClustering,
                 decompose::Provenance::DuplicateVariant, decompose::Provenance::MergeVariant,
                 decompose::Provenance::ExternalVariant})
    EXPECT_EQ(decompose::provenance_from_string(decompose::to_string(p)), p);
  EXPECT_THROW(decompose::provenance_from_string("nope"), std::invalid_argument);
}
