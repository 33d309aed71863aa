#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "monoslicer/model.hpp"

namespace monoslicer::ingest {

enum class LogFormat { Csv, Jsonl, Auto };
enum class TimestampFormat { Rfc3339, Hms, Hm, Auto };
enum class BadRowPolicy { Fail, SkipAndReport };

struct IngestConfig {
  LogFormat format = LogFormat::Auto;
  TimestampFormat timestamp_format = TimestampFormat::Auto;
  BadRowPolicy on_bad_row = BadRowPolicy::Fail;
  std::optional<int> session_gap_minutes;
  /// Containers treated as entry points in addition to "*.jsp".
  std::vector<std::string> entrypoints;
};

enum class RowErrorKind {
  UnknownFormat,
  TimestampUnparseable,
  MissingColumn,
  EmptySessionId,
  InvertedInterval,
  MalformedRow,
};

std::string_view to_string(RowErrorKind kind);

struct RowError {
  std::size_t line = 0;  // 1-based physical line where the row starts
  RowErrorKind kind = RowErrorKind::MalformedRow;
  std::string reason;
};

class IngestError : public std::runtime_error {
 public:
  explicit IngestError(RowError error);
  const RowError& error() const { return error_; }

 private:
  RowError error_;
};

struct ParseResult {
  std::vector<LogEvent> events;  // file order
  std::vector<RowError> errors;
};

/// Throws IngestError on the first bad row when on_bad_row is Fail, and on
/// UnknownFormat regardless of policy.
ParseResult parse_log(std::string_view bytes, const IngestConfig& cfg);

/// One trace per session (split further on idle gaps when configured).
std::vector<ExecutionTrace> assemble_traces(const std::vector<LogEvent>& events,
                                            const IngestConfig& cfg);

/// Kind inference: "DB" containers or "TABLE *" members are datastores,
/// "*.jsp" or configured containers are entry points.
NodeKind infer_kind(std::string_view container, std::string_view member,
                    const std::vector<std::string>& entrypoints = {});

/// Throws std::invalid_argument when no accepted form matches.
Timestamp parse_timestamp(std::string_view text, TimestampFormat format);
/// RFC3339 UTC with milliseconds, e.g. "1970-01-01T01:00:00.000Z".
std::string format_timestamp(Timestamp ts);

/// Header-bearing CSV that parse_log reads back to the same events.
std::string emit_csv(const std::vector<LogEvent>& events);

}  // namespace monoslicer::ingest
