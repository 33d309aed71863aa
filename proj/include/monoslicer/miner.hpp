#pragma once

#include <cstddef>
#include <vector>

#include "monoslicer/model.hpp"

namespace monoslicer::miner {

PathFrequencyTable path_frequency_table(const std::vector<ExecutionTrace>& traces);

/// Directly-follows graph: every consecutive pair of a row adds the row's
/// frequency to that edge. Repeated pairs within one row each count.
CallGraph build_call_graph(const PathFrequencyTable& table);

/// First min(n, size) rows. Throws std::invalid_argument when n == 0.
std::vector<PathRow> top_paths(const PathFrequencyTable& table, std::size_t n);

}  // namespace monoslicer::miner
