#include "monoslicer/miner.hpp"

#include <stdexcept>

#include "monoslicer/kernels.hpp"

namespace monoslicer::miner {

PathFrequencyTable path_frequency_table(const std::vector<ExecutionTrace>& traces) {
  return kernels::count_paths(traces);
}

CallGraph build_call_graph(const PathFrequencyTable& table) { return kernels::directly_follows(table); }

std::vector<PathRow> top_paths(const PathFrequencyTable& table, std::size_t n) {
  if (n == 0) throw std::invalid_argument("top_paths needs n >= 1");
  const auto& rows = table.rows();
  return {rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(std::min(n, rows.size()))};
}

}  // namespace monoslicer::miner
