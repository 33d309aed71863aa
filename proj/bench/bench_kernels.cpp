// OpenMP kernels against their serial references on synthetic inputs.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "monoslicer/kernels.hpp"

using namespace monoslicer;

namespace {

std::string class_name(std::size_t i) { return "C" + std::to_string(i); }

std::vector<ExecutionTrace> make_traces(std::size_t count, std::size_t classes) {
  std::uniform_int_distribution<std::size_t> pick(0, classes - 1);
  std::uniform_int_distribution<std::size_t> length(2, 12);
  std::vector<ExecutionTrace> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].session_id = "s" + std::to_string(i);
    // A small pool of shapes so the frequency table has repeated paths.
    std::mt19937_64 shape(i % 97);
    for (std::size_t j = 0, n = length(shape); j < n; ++j)
      out[i].events.push_back({NodeKind::ClassMethod, class_name(pick(shape)), j % 2 ? "get()" : "run()"});
  }
  return out;
}

ClassGraph make_graph(std::size_t n, double p) {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<std::uint64_t> weight(1, 500);
  std::vector<ClassNode> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({class_name(i), NodeKind::ClassMethod});
  std::vector<ClassEdge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (coin(rng)) edges.push_back({class_name(i), class_name(j), weight(rng)});
  return ClassGraph::from_parts(std::move(nodes), std::move(edges));
}

std::vector<Decomposition> make_decompositions(const ClassGraph& g, std::size_t count, std::size_t services) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> pick(0, services - 1);
  std::bernoulli_distribution duplicate(0.05);
  std::vector<Decomposition> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k].id = "d" + std::to_string(k);
    for (const auto& node : g.nodes()) {
      out[k].assignment["S" + std::to_string(pick(rng))].insert(node.name);
      if (duplicate(rng)) out[k].assignment["S" + std::to_string(pick(rng))].insert(node.name);
    }
  }
  return out;
}

template <auto Kernel>
void count_paths(benchmark::State& state) {
  const auto traces = make_traces(static_cast<std::size_t>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(traces));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void directly_follows(benchmark::State& state) {
  const auto table = kernels::serial::count_paths(make_traces(static_cast<std::size_t>(state.range(0)), 200));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(table));
}

template <auto Kernel>
void classify(benchmark::State& state) {
  const auto g = make_graph(static_cast<std::size_t>(state.range(0)), 0.05);
  const auto d = make_decompositions(g, 1, 8).front();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(g, d));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.edges().size()));
}

template <auto Kernel>
void evaluate_all(benchmark::State& state) {
  const auto g = make_graph(300, 0.05);
  const auto ds = make_decompositions(g, static_cast<std::size_t>(state.range(0)), 8);
  const metrics::MetricsOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(ds, g, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(count_paths<kernels::count_paths>)->Name("count_paths/omp")->Arg(1000)->Arg(20000);
BENCHMARK(count_paths<kernels::serial::count_paths>)->Name("count_paths/serial")->Arg(1000)->Arg(20000);
BENCHMARK(directly_follows<kernels::directly_follows>)->Name("directly_follows/omp")->Arg(20000);
BENCHMARK(directly_follows<kernels::serial::directly_follows>)->Name("directly_follows/serial")->Arg(20000);
BENCHMARK(classify<kernels::classify>)->Name("classify/omp")->Arg(200)->Arg(1000);
BENCHMARK(classify<kernels::serial::classify>)->Name("classify/serial")->Arg(200)->Arg(1000);
BENCHMARK(evaluate_all<kernels::evaluate_all>)->Name("evaluate_all/omp")->Arg(8)->Arg(64);
BENCHMARK(evaluate_all<kernels::serial::evaluate_all>)->Name("evaluate_all/serial")->Arg(8)->Arg(64);

BENCHMARK_MAIN();
