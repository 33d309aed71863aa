#include <gtest/gtest.h>

#include <omp.h>

#include <random>

#include "monoslicer/kernels.hpp"
#include "support.hpp"

using namespace monoslicer;

namespace {

std::vector<ExecutionTrace> random_traces(std::mt19937_64& rng, std::size_t n) {
  std::vector<ExecutionTrace> out;
  for (std::size_t i = 0; i < n; ++i) {
    ExecutionTrace t;
    t.session_id = "s" + std::to_string(i);
    for (std::size_t j = 0, len = 1 + rng() % 6; j < len; ++j)
      t.events.push_back(testkit::method(testkit::node_name(rng() % 6), rng() % 2 ? "a()" : "b()"));
    out.push_back(std::move(t));
  }
  return out;
}

class ThreadCounts : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(GetParam());
  }
  void TearDown() override { omp_set_num_threads(saved_); }

 private:
  int saved_ = 1;
};

}  // namespace

TEST_P(ThreadCounts, CountPathsMatchesSerial) {
  std::mt19937_64 rng(51);
  for (std::size_t n : {0u, 1u, 7u, 500u, 5000u}) {
    auto traces = random_traces(rng, n);
    ASSERT_EQ(kernels::count_paths(traces), kernels::serial::count_paths(traces));
  }
}

TEST_P(ThreadCounts, DirectlyFollowsMatchesSerial) {
  std::mt19937_64 rng(52);
  for (std::size_t n : {0u, 3u, 2000u}) {
    auto table = kernels::serial::count_paths(random_traces(rng, n));
    ASSERT_EQ(kernels::directly_follows(table), kernels::serial::directly_follows(table));
  }
}

TEST_P(ThreadCounts, ClassifyAndEvaluateMatchSerial) {
  std::mt19937_64 rng(53);
  metrics::MetricsOptions opts;
  for (int round = 0; round < 50; ++round) {
    auto g = testkit::random_class_graph(rng, 1 + rng() % 12, 0.3);
    std::vector<Decomposition> ds;
    for (std::size_t i = 0, n = rng() % 8; i < n; ++i) {
      ds.push_back(testkit::random_decomposition(rng, g, 1 + rng() % 4, 1 + rng() % 2, 0.1));
      ds.back().id = "d" + std::to_string(i);
    }
    for (const auto& d : ds) ASSERT_EQ(kernels::classify(g, d), kernels::serial::classify(g, d));
    ASSERT_EQ(kernels::evaluate_all(ds, g, opts), kernels::serial::evaluate_all(ds, g, opts));
  }
}

INSTANTIATE_TEST_SUITE_P(Kernels, ThreadCounts, ::testing::Values(1, 2, 4, 8));

TEST(Kernels, MaxThreadsPositive) { EXPECT_GE(kernels::max_threads(), 1); }
