#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "monoslicer/model.hpp"

namespace monoslicer::decompose {

enum class Verdict { Internal, External };

struct EdgeClassification {
  ClassEdge edge;
  Verdict verdict = Verdict::Internal;
  std::string attributed_service;
  std::optional<std::string> target_service;  // External only

  friend bool operator==(const EdgeClassification&, const EdgeClassification&) = default;
};

/// An edge left out of classification because an endpoint is in no service.
/// source_service is set when the source is assigned (the call still leaves
/// that service toward something outside the decomposition).
struct UnassignedEndpoint {
  ClassEdge edge;
  std::string container;
  std::optional<std::string> source_service;

  friend bool operator==(const UnassignedEndpoint&, const UnassignedEndpoint&) = default;
};

struct Classification {
  std::vector<EdgeClassification> edges;  // graph edge order, assigned edges only
  std::vector<UnassignedEndpoint> unassigned;

  std::uint64_t internal_weight() const;
  std::uint64_t external_weight() const;

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Internal when some service holds both endpoints (the lexicographically
/// smallest such service is credited); External otherwise, from the smallest
/// service holding the source to the smallest holding the target.
Classification classify_edges(const ClassGraph& g, const Decomposition& d);

enum class Provenance { UserSpecified, BaseClustering, DuplicateVariant, MergeVariant, ExternalVariant };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view text);

struct Candidate {
  Decomposition decomposition;
  Provenance provenance = Provenance::UserSpecified;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct CandidateSet {
  std::vector<Candidate> candidates;

  const Candidate* find(std::string_view id) const;
  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

struct GenerateOptions {
  std::size_t max_candidates = 50;
  std::size_t max_shared_expansion = 5;
  /// Paths whose container sets have Jaccard similarity at or above this
  /// value fall into the same cluster.
  double path_similarity = 0.5;
  std::vector<Decomposition> user_specified;
};

class EmptyGraphError : public std::invalid_argument {
 public:
  EmptyGraphError() : std::invalid_argument("cannot generate candidates for an empty graph") {}
};

/// Path clusters become services; containers used by several clusters are
/// pulled into shared services in the base candidate, then each of the
/// busiest ones is expanded into a duplicate, a merge and an external
/// variant.
CandidateSet generate_candidates(const ClassGraph& g, const PathFrequencyTable& table,
                                 const GenerateOptions& opts = {});

/// Visits every set partition of the graph's containers (no duplication),
/// as decompositions with services S1, S2, ... Intended as a test oracle;
/// throws std::invalid_argument above kMaxPartitionContainers containers.
inline constexpr std::size_t kMaxPartitionContainers = 12;
void for_each_partition(const ClassGraph& g, const std::function<void(const Decomposition&)>& visit);

class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON array of {id, label, services: {name: [containers]}}. Throws
/// DocumentError on malformed JSON, empty or duplicate service names, empty
/// service maps and duplicate ids.
std::vector<Decomposition> load_decompositions(std::string_view bytes);

}  // namespace monoslicer::decompose
