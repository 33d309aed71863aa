#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <unordered_set>

#include "monoslicer/model.hpp"
#include "support.hpp"

using namespace monoslicer;
using testkit::method;
using testkit::path;

TEST(NodeKind, NamesRoundTrip) {
  for (auto k : {NodeKind::ClassMethod, NodeKind::DataStore, NodeKind::EntryPoint})
    EXPECT_EQ(node_kind_from_string(to_string(k)), k);
  EXPECT_THROW(node_kind_from_string("table"), std::invalid_argument);
}

TEST(NodeKind, ClassCounting) {
  EXPECT_TRUE(counts_as_class(NodeKind::ClassMethod, false));
  EXPECT_FALSE(counts_as_class(NodeKind::DataStore, true));
  EXPECT_FALSE(counts_as_class(NodeKind::EntryPoint, false));
  EXPECT_TRUE(counts_as_class(NodeKind::EntryPoint, true));
}

TEST(NodeRef, OrderingAndDisplay) {
  EXPECT_LT(method("A", "b()"), method("B", "a()"));
  EXPECT_LT(method("A", "a()"), method("A", "b()"));
  EXPECT_NE(method("DB", "x", NodeKind::DataStore), method("DB", "x"));
  EXPECT_EQ(method("A.java", "a()").display(), "A.java.a()");
}

TEST(PathSignature, HashConsistentWithEquality) {
  std::mt19937_64 rng(7);
  std::vector<PathSignature> sigs;
  for (int i = 0; i < 300; ++i) {
    PathSignature s;
    int len = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < len; ++j) s.sequence.push_back(method(std::string(1, 'A' + rng() % 3), rng() % 2 ? "a()" : "b()"));
    sigs.push_back(s);
  }
  std::hash<PathSignature> h;
  for (const auto& a : sigs)
    for (const auto& b : sigs) {
      EXPECT_EQ(a == b, b == a);
      if (a == b) EXPECT_EQ(h(a), h(b));
      EXPECT_EQ(a == b, (a <=> b) == 0);
    }
}

TEST(PathFrequencyTable, CanonicalOrder) {
  auto t = PathFrequencyTable::from_rows({{path("B.a()"), 5}, {path("A.a()"), 5}, {path("C.c()"), 9}});
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.rows()[0].signature, path("C.c()"));
  EXPECT_EQ(t.rows()[1].signature, path("A.a()"));
  EXPECT_EQ(t.rows()[2].signature, path("B.a()"));
  EXPECT_EQ(t.total_frequency(), 19u);
}

TEST(PathFrequencyTable, RejectsDuplicatesAndEmptySignatures) {
  EXPECT_THROW(PathFrequencyTable::from_rows({{path("A.a()"), 1}, {path("A.a()"), 2}}), std::invalid_argument);
  EXPECT_THROW(PathFrequencyTable::from_rows({{PathSignature{}, 1}}), std::invalid_argument);
}

TEST(PathFrequencyTable, MergeSums) {
  auto a = PathFrequencyTable::from_rows({{path("A.a()"), 2}, {path("B.b()"), 1}});
  auto b = PathFrequencyTable::from_rows({{path("A.a()"), 3}, {path("C.c()"), 4}});
  auto m = merge_tables(a, b);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.rows()[0], (PathRow{path("A.a()"), 5}));
  EXPECT_EQ(m.rows()[1], (PathRow{path("C.c()"), 4}));
}

TEST(CallGraph, FromPartsCanonicalizes) {
  auto g = CallGraph::from_parts({}, {{method("B", "b()"), method("A", "a()"), 3}, {method("A", "a()"), method("B", "b()"), 2}});
  ASSERT_EQ(g.nodes().size(), 2u);
  EXPECT_EQ(g.nodes()[0], method("A", "a()"));
  EXPECT_EQ(g.edges()[0].source, method("A", "a()"));
  EXPECT_EQ(g.total_weight(), 5u);
  EXPECT_EQ(g.weight(method("B", "b()"), method("A", "a()")), 3u);
  EXPECT_FALSE(g.weight(method("A", "a()"), method("A", "a()")));
}

TEST(CallGraph, RejectsZeroAndRepeatedEdges) {
  EXPECT_THROW(CallGraph::from_parts({}, {{method("A", "a()"), method("B", "b()"), 0}}), std::invalid_argument);
  EXPECT_THROW(CallGraph::from_parts({}, {{method("A", "a()"), method("B", "b()"), 1}, {method("A", "a()"), method("B", "b()"), 1}}),
               std::invalid_argument);
}

TEST(ClassGraph, MissingEndpointsBecomeClasses) {
  auto g = ClassGraph::from_parts({{"DB", NodeKind::DataStore}}, {{"A", "DB", 4}, {"A", "A", 1}});
  ASSERT_EQ(g.nodes().size(), 2u);
  EXPECT_EQ(g.kind_of("A"), NodeKind::ClassMethod);
  EXPECT_EQ(g.kind_of("DB"), NodeKind::DataStore);
  EXPECT_EQ(g.index_of("DB"), 1u);
  EXPECT_FALSE(g.contains("X"));
  EXPECT_TRUE(g.edges()[0].self_loop());
}

TEST(Validate, SpecCases) {
  auto g = ClassGraph::from_parts({{"A", NodeKind::ClassMethod}, {"B", NodeKind::ClassMethod}}, {});
  EXPECT_TRUE(validate_decomposition(testkit::decomposition("d", {{"MS1", {"A", "B"}}}), g).violations.empty());

  auto unknown = validate_decomposition(testkit::decomposition("d", {{"MS1", {"A", "X"}}}), g);
  EXPECT_FALSE(unknown.ok());
  ASSERT_FALSE(unknown.errors().empty());
  EXPECT_EQ(unknown.errors()[0].message, "unknown container X");

  auto partial = validate_decomposition(testkit::decomposition("d", {{"MS1", {"A"}}}), g);
  EXPECT_TRUE(partial.ok());
  ASSERT_EQ(partial.warnings().size(), 1u);
  EXPECT_EQ(partial.warnings()[0].message, "unassigned: B");
}

TEST(Validate, EmptyServicesAndNames) {
  auto g = ClassGraph::from_parts({{"A", NodeKind::ClassMethod}}, {});
  auto r = validate_decomposition(testkit::decomposition("d", {{"", {"A"}}, {"MS2", {}}}), g);
  std::vector<std::string> codes;
  for (const auto& v : r.errors()) codes.push_back(v.code);
  EXPECT_NE(std::find(codes.begin(), codes.end(), "empty_service_name"), codes.end());
  EXPECT_NE(std::find(codes.begin(), codes.end(), "empty_service"), codes.end());
}
