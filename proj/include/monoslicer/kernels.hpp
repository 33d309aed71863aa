#pragma once

// Hot loops of the pipeline. Each kernel has an OpenMP version (used by the
// public operations) and a plain serial version kept as the test and
// benchmark reference. Both must return identical values for any thread
// count.

#include <span>
#include <vector>

#include "monoslicer/decompose.hpp"
#include "monoslicer/metrics.hpp"
#include "monoslicer/model.hpp"

namespace monoslicer::kernels {

PathFrequencyTable count_paths(std::span<const ExecutionTrace> traces);
CallGraph directly_follows(const PathFrequencyTable& table);
decompose::Classification classify(const ClassGraph& g, const Decomposition& d);
std::vector<metrics::Evaluation> evaluate_all(std::span<const Decomposition> decompositions,
                                              const ClassGraph& g,
                                              const metrics::MetricsOptions& opts);

/// Threads OpenMP will use for the kernels above.
int max_threads();

namespace serial {

PathFrequencyTable count_paths(std::span<const ExecutionTrace> traces);
CallGraph directly_follows(const PathFrequencyTable& table);
decompose::Classification classify(const ClassGraph& g, const Decomposition& d);
std::vector<metrics::Evaluation> evaluate_all(std::span<const Decomposition> decompositions,
                                              const ClassGraph& g,
                                              const metrics::MetricsOptions& opts);

}  // namespace serial
}  // namespace monoslicer::kernels
