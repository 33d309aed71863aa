#pragma once

// Canonical on-disk and on-wire forms. JSON field names follow the domain
// types in lower_snake_case; every emitter is byte-deterministic.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "monoslicer/decompose.hpp"
#include "monoslicer/metrics.hpp"
#include "monoslicer/model.hpp"

namespace monoslicer::io {

using nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-space indented JSON with a trailing newline.
std::string dump(const json& doc);

json to_json(const NodeRef& n);
json to_json(const std::vector<ExecutionTrace>& traces);
json to_json(const CallGraph& g);
json to_json(const ClassGraph& g);
json to_json(const CycleReport& r);
json to_json(const Decomposition& d);
json to_json(const std::vector<Decomposition>& ds);
json to_json(const decompose::CandidateSet& c);
json to_json(const ServiceMetrics& m);
json to_json(const SystemMetrics& m);
json to_json(const Violation& v);
json to_json(const ValidationResult& v);
json to_json(const metrics::Evaluation& e);
json to_json(const std::vector<metrics::Evaluation>& es);
json to_json(const metrics::ComparisonReport& r);

// Parsers throw FormatError on shape errors.
NodeRef node_from_json(const json& j);
std::vector<ExecutionTrace> traces_from_json(const json& j);
CallGraph call_graph_from_json(const json& j);
ClassGraph class_graph_from_json(const json& j);
/// Accepts either graph document; call graphs are collapsed to class level.
ClassGraph any_graph_from_json(const json& j);
bool is_call_graph_document(const json& j);
Decomposition decomposition_from_json(const json& j);
/// Accepts a CandidateSet document or a plain decomposition array (the
/// latter marked UserSpecified).
decompose::CandidateSet candidate_set_from_json(const json& j);

/// Throws FormatError with line/column on malformed text.
json parse_json(std::string_view text);

/// "path,frequency" CSV. Paths are ';'-joined "container.member" items;
/// '\' escapes ';', '\' and '.' inside members (and ';', '\' in containers).
std::string emit_table_csv(const PathFrequencyTable& table);
PathFrequencyTable parse_table_csv(std::string_view text, const std::vector<std::string>& entrypoints = {});

std::string encode_path(const PathSignature& p);
PathSignature decode_path(std::string_view text, const std::vector<std::string>& entrypoints = {});

/// One row per service per evaluation.
std::string evaluations_csv(const std::vector<metrics::Evaluation>& es);
/// Fixed-width table: MS | CBM | #Links | #Classes | #Dupl. Classes | FEC.
std::string evaluations_table(const std::vector<metrics::Evaluation>& es);
std::string comparison_csv(const metrics::ComparisonReport& r);
std::string comparison_table(const metrics::ComparisonReport& r);

/// Minimal RFC 4180 field quoting.
std::string csv_field(std::string_view field);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace monoslicer::io
