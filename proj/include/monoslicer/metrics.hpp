#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monoslicer/decompose.hpp"
#include "monoslicer/model.hpp"

namespace monoslicer::metrics {

/// How "#Links" is counted for CBM.
enum class LinkMode {
  DistinctServices,   // distinct target services per source service
  DistinctCallSites,  // distinct (source container, target container) external pairs
};

struct MetricsOptions {
  Rational external_weight = 1000;
  bool include_entrypoints = false;
  /// Each distinct unassigned container called from a service adds one link.
  bool count_unassigned_links = true;
  LinkMode link_mode = LinkMode::DistinctServices;
};

/// One entry per service, in service-name order. Services without any
/// countable class come back with cla == 0 and empty cbm/fec.
std::vector<ServiceMetrics> service_metrics(const ClassGraph& g, const Decomposition& d,
                                            const decompose::Classification& classification,
                                            const MetricsOptions& opts = {});

SystemMetrics system_metrics(const ClassGraph& g, const Decomposition& d,
                             const decompose::Classification& classification,
                             const MetricsOptions& opts = {});

/// Result of scoring one decomposition.
struct Evaluation {
  std::string id;
  std::string label;
  std::vector<ServiceMetrics> services;
  SystemMetrics system;
  std::vector<decompose::UnassignedEndpoint> unassigned;
  std::vector<Violation> violations;  // validation findings plus zero_class_service flags

  friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

Evaluation evaluate(const ClassGraph& g, const Decomposition& d, const MetricsOptions& opts = {});

/// evaluate() with the classification step already done.
Evaluation assemble_evaluation(const ClassGraph& g, const Decomposition& d,
                               decompose::Classification classification,
                               const MetricsOptions& opts = {});

/// Comparison objectives, all minimized.
struct Summary {
  Rational mean_cbm = 0;  // unweighted over services with cla >= 1
  std::int64_t max_cla = 0;
  std::int64_t duplicated_classes_total = 0;
  Rational load = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

Summary summarize(const Evaluation& e);

/// a is no worse on every objective and strictly better on at least one.
bool dominates(const Summary& a, const Summary& b);

/// Non-dominated flags, index-aligned with `points`.
std::vector<bool> pareto_front(const std::vector<Summary>& points);

struct ComparisonEntry {
  std::string id;
  std::string label;
  decompose::Provenance provenance = decompose::Provenance::UserSpecified;
  Evaluation evaluation;
  Summary summary;
  bool pareto_optimal = false;
};

struct ComparisonReport {
  std::vector<ComparisonEntry> entries;  // candidate order, never ranked
};

inline constexpr const char* kObjectivesNote =
    "Pareto objectives (all minimized): mean_cbm, max_cla, duplicated_classes_total, load. "
    "Candidates are not ranked; choosing among Pareto-optimal candidates is the architect's decision.";

/// Evaluates every candidate (in parallel) and flags the Pareto front.
/// Throws std::invalid_argument on an empty candidate set.
ComparisonReport compare(const decompose::CandidateSet& candidates, const ClassGraph& g,
                         const MetricsOptions& opts = {});

}  // namespace monoslicer::metrics
