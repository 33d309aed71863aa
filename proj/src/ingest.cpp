#include "monoslicer/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <map>

#include <json.hpp>

#include "monoslicer/io.hpp"

namespace monoslicer::ingest {

namespace {

constexpr std::array<std::string_view, 5> kCsvColumns = {"start_time", "end_time", "session_id", "class", "method"};
constexpr std::array<std::string_view, 5> kJsonKeys = {"start", "end", "session", "class", "method"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

bool iends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && iequals(s.substr(s.size() - suffix.size()), suffix);
}

// Reads exactly `width` digits (or 1..width when width_max) from s at pos.
bool read_int(std::string_view s, std::size_t& pos, std::size_t min_w, std::size_t max_w, int& out) {
  std::size_t end = pos;
  while (end < s.size() && end - pos < max_w && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
  if (end - pos < min_w) return false;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + end, out);
  if (ec != std::errc{}) return false;
  pos = end;
  return true;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos < s.size() && s[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

// Fractional seconds: up to millisecond precision, further digits dropped.
bool read_fraction(std::string_view s, std::size_t& pos, int& millis) {
  millis = 0;
  if (!expect(s, pos, '.')) return true;
  std::size_t digits = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    if (digits < 3) millis = millis * 10 + (s[pos] - '0');
    ++digits;
    ++pos;
  }
  if (digits == 0) return false;
  for (std::size_t i = digits; i < 3; ++i) millis *= 10;
  return true;
}

std::optional<Timestamp> parse_clock(std::string_view s, bool with_seconds) {
  std::size_t pos = 0;
  int h = 0, m = 0, sec = 0, ms = 0;
  if (!read_int(s, pos, 1, 3, h) || !expect(s, pos, ':') || !read_int(s, pos, 2, 2, m)) return std::nullopt;
  if (with_seconds) {
    if (!expect(s, pos, ':') || !read_int(s, pos, 2, 2, sec) || !read_fraction(s, pos, ms)) return std::nullopt;
  }
  if (pos != s.size() || m > 59 || sec > 60) return std::nullopt;
  return Timestamp{((static_cast<std::int64_t>(h) * 60 + m) * 60 + sec) * 1000 + ms};
}

std::optional<Timestamp> parse_rfc3339(std::string_view s) {
  using namespace std::chrono;
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
  if (!read_int(s, pos, 4, 4, y) || !expect(s, pos, '-') || !read_int(s, pos, 2, 2, mo) ||
      !expect(s, pos, '-') || !read_int(s, pos, 2, 2, d))
    return std::nullopt;
  if (pos >= s.size() || (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ')) return std::nullopt;
  ++pos;
  if (!read_int(s, pos, 2, 2, h) || !expect(s, pos, ':') || !read_int(s, pos, 2, 2, mi) ||
      !expect(s, pos, ':') || !read_int(s, pos, 2, 2, sec) || !read_fraction(s, pos, ms))
    return std::nullopt;

  std::int64_t offset_minutes = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    const int sign = s[pos] == '-' ? -1 : 1;
    ++pos;
    int oh = 0, om = 0;
    if (!read_int(s, pos, 2, 2, oh) || !expect(s, pos, ':') || !read_int(s, pos, 2, 2, om)) return std::nullopt;
    offset_minutes = sign * (oh * 60 + om);
  } else {
    return std::nullopt;
  }
  if (pos != s.size() || h > 23 || mi > 59 || sec > 60) return std::nullopt;

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  const std::int64_t days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  const std::int64_t seconds = ((days_since_epoch * 24 + h) * 60 + mi) * 60 + sec - offset_minutes * 60;
  return Timestamp{seconds * 1000 + ms};
}

struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// RFC 4180 records; quoted fields may span lines.
std::vector<CsvRecord> split_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool in_quotes = false;
    bool done = false;
    while (i < text.size() && !done) {
      char c = text[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          in_quotes = false;
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
        ++i;
        continue;
      }
      switch (c) {
        case '"': in_quotes = true; break;
        case ',':
          rec.fields.push_back(std::move(field));
          field.clear();
          break;
        case '\r': break;
        case '\n':
          ++line;
          done = true;
          break;
        default: field.push_back(c);
      }
      ++i;
    }
    rec.fields.push_back(std::move(field));
    bool blank = rec.fields.size() == 1 && trim(rec.fields[0]).empty();
    if (!blank) records.push_back(std::move(rec));
  }
  return records;
}

class RowSink {
 public:
  RowSink(const IngestConfig& cfg, ParseResult& out) : cfg_(cfg), out_(out) {}

  void error(std::size_t line, RowErrorKind kind, std::string reason) {
    RowError e{line, kind, std::move(reason)};
    if (cfg_.on_bad_row == BadRowPolicy::Fail) throw IngestError(std::move(e));
    out_.errors.push_back(std::move(e));
  }

  // Validates one row's raw values and appends the event.
  void row(std::size_t line, std::string_view start, std::string_view end, std::string_view session,
           std::string_view container, std::string_view member) {
    start = trim(start);
    end = trim(end);
    session = trim(session);
    container = trim(container);
    member = trim(member);

    Timestamp ts_start, ts_end;
    try {
      ts_start = parse_timestamp(start, cfg_.timestamp_format);
    } catch (const std::invalid_argument&) {
      return error(line, RowErrorKind::TimestampUnparseable, "unparseable start time '" + std::string(start) + "'");
    }
    try {
      ts_end = parse_timestamp(end, cfg_.timestamp_format);
    } catch (const std::invalid_argument&) {
      return error(line, RowErrorKind::TimestampUnparseable, "unparseable end time '" + std::string(end) + "'");
    }
    if (session.empty()) return error(line, RowErrorKind::EmptySessionId, "empty session id");
    if (container.empty()) return error(line, RowErrorKind::MissingColumn, "empty class");
    if (member.empty()) return error(line, RowErrorKind::MissingColumn, "empty method");
    if (ts_end < ts_start) return error(line, RowErrorKind::InvertedInterval, "end time precedes start time");

    LogEvent ev;
    ev.start_time = ts_start;
    ev.end_time = ts_end;
    ev.session_id = std::string(session);
    ev.node = NodeRef{infer_kind(container, member, cfg_.entrypoints), std::string(container), std::string(member)};
    out_.events.push_back(std::move(ev));
  }

 private:
  const IngestConfig& cfg_;
  ParseResult& out_;
};

void parse_csv(std::string_view text, const IngestConfig& cfg, ParseResult& out) {
  auto records = split_csv(text);
  if (records.empty()) return;
  RowSink sink(cfg, out);

  const auto& header = records.front();
  std::array<std::size_t, 5> column{};
  std::size_t found = 0;
  for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
    auto it = std::find_if(header.fields.begin(), header.fields.end(),
                           [&](const std::string& f) { return trim(f) == kCsvColumns[c]; });
    column[c] = static_cast<std::size_t>(it - header.fields.begin());
    if (it != header.fields.end()) ++found;
  }
  if (found == 0)
    throw IngestError({header.line, RowErrorKind::UnknownFormat,
                       "first line is not the header start_time,end_time,session_id,class,method"});
  for (std::size_t c = 0; c < kCsvColumns.size(); ++c)
    if (column[c] == header.fields.size())
      throw IngestError({header.line, RowErrorKind::MissingColumn, "header lacks column " + std::string(kCsvColumns[c])});

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    bool complete = true;
    for (std::size_t c = 0; c < kCsvColumns.size(); ++c) {
      if (column[c] >= rec.fields.size()) {
        sink.error(rec.line, RowErrorKind::MissingColumn, "missing column " + std::string(kCsvColumns[c]));
        complete = false;
        break;
      }
    }
    if (!complete) continue;
    sink.row(rec.line, rec.fields[column[0]], rec.fields[column[1]], rec.fields[column[2]], rec.fields[column[3]],
             rec.fields[column[4]]);
  }
}

void parse_jsonl(std::string_view text, const IngestConfig& cfg, ParseResult& out) {
  RowSink sink(cfg, out);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      sink.error(line_no, RowErrorKind::MalformedRow, std::string("invalid JSON: ") + e.what());
      continue;
    }
    if (!obj.is_object()) {
      sink.error(line_no, RowErrorKind::MalformedRow, "row is not a JSON object");
      continue;
    }
    std::array<std::string, 5> values;
    bool ok = true;
    for (std::size_t k = 0; k < kJsonKeys.size() && ok; ++k) {
      auto it = obj.find(std::string(kJsonKeys[k]));
      if (it == obj.end()) {
        sink.error(line_no, RowErrorKind::MissingColumn, "missing key " + std::string(kJsonKeys[k]));
        ok = false;
      } else if (!it->is_string()) {
        sink.error(line_no, RowErrorKind::MalformedRow, "key " + std::string(kJsonKeys[k]) + " is not a string");
        ok = false;
      } else {
        values[k] = it->get<std::string>();
      }
    }
    if (ok) sink.row(line_no, values[0], values[1], values[2], values[3], values[4]);
    if (nl == text.size()) break;
  }
}

}  // namespace

std::string_view to_string(RowErrorKind kind) {
  switch (kind) {
    case RowErrorKind::UnknownFormat: return "UnknownFormat";
    case RowErrorKind::TimestampUnparseable: return "TimestampUnparseable";
    case RowErrorKind::MissingColumn: return "MissingColumn";
    case RowErrorKind::EmptySessionId: return "EmptySessionId";
    case RowErrorKind::InvertedInterval: return "InvertedInterval";
    case RowErrorKind::MalformedRow: return "MalformedRow";
  }
  return "MalformedRow";
}

IngestError::IngestError(RowError error)
    : std::runtime_error("line " + std::to_string(error.line) + ": " + std::string(to_string(error.kind)) + ": " +
                         error.reason),
      error_(std::move(error)) {}

NodeKind infer_kind(std::string_view container, std::string_view member, const std::vector<std::string>& entrypoints) {
  if (iequals(container, "DB") || istarts_with(member, "TABLE ")) return NodeKind::DataStore;
  if (iends_with(container, ".jsp")) return NodeKind::EntryPoint;
  if (std::find(entrypoints.begin(), entrypoints.end(), container) != entrypoints.end()) return NodeKind::EntryPoint;
  return NodeKind::ClassMethod;
}

Timestamp parse_timestamp(std::string_view text, TimestampFormat format) {
  text = trim(text);
  std::optional<Timestamp> ts;
  switch (format) {
    case TimestampFormat::Rfc3339: ts = parse_rfc3339(text); break;
    case TimestampFormat::Hms: ts = parse_clock(text, true); break;
    case TimestampFormat::Hm: ts = parse_clock(text, false); break;
    case TimestampFormat::Auto:
      if (text.size() >= 10 && text[4] == '-') {
        ts = parse_rfc3339(text);
      } else {
        ts = std::count(text.begin(), text.end(), ':') == 2 ? parse_clock(text, true) : parse_clock(text, false);
      }
      break;
  }
  if (!ts) throw std::invalid_argument("unparseable timestamp '" + std::string(text) + "'");
  return *ts;
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const sys_time<milliseconds> tp{milliseconds{ts.ms}};
  const auto day_start = floor<days>(tp);
  const year_month_day ymd{day_start};
  const hh_mm_ss<milliseconds> tod{tp - day_start};

  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(tod.hours().count()), static_cast<long long>(tod.minutes().count()),
                static_cast<long long>(tod.seconds().count()), static_cast<long long>(tod.subseconds().count()));
  return buf;
}

ParseResult parse_log(std::string_view bytes, const IngestConfig& cfg) {
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  ParseResult out;

  LogFormat format = cfg.format;
  if (format == LogFormat::Auto) {
    auto first = std::find_if(bytes.begin(), bytes.end(), [](char c) { return !std::isspace(static_cast<unsigned char>(c)); });
    if (first == bytes.end()) return out;
    format = *first == '{' ? LogFormat::Jsonl : LogFormat::Csv;
  }
  if (format == LogFormat::Csv) {
    parse_csv(bytes, cfg, out);
  } else {
    parse_jsonl(bytes, cfg, out);
  }
  return out;
}

std::vector<ExecutionTrace> assemble_traces(const std::vector<LogEvent>& events, const IngestConfig& cfg) {
  std::map<std::string_view, std::vector<std::size_t>> by_session;
  for (std::size_t i = 0; i < events.size(); ++i) by_session[events[i].session_id].push_back(i);

  const std::int64_t gap_ms =
      cfg.session_gap_minutes ? static_cast<std::int64_t>(*cfg.session_gap_minutes) * 60'000 : -1;

  std::vector<ExecutionTrace> traces;
  for (auto& [session, idx] : by_session) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return events[a].start_time < events[b].start_time; });
    ExecutionTrace current;
    for (std::size_t i : idx) {
      const auto& ev = events[i];
      if (!current.events.empty() && gap_ms >= 0 && ev.start_time.ms - current.last_end.ms > gap_ms) {
        traces.push_back(std::move(current));
        current = ExecutionTrace{};
      }
      if (current.events.empty()) {
        current.session_id = ev.session_id;
        current.first_start = ev.start_time;
        current.last_end = ev.end_time;
      }
      current.events.push_back(ev.node);
      current.last_end = std::max(current.last_end, ev.end_time);
    }
    if (!current.events.empty()) traces.push_back(std::move(current));
  }

  std::stable_sort(traces.begin(), traces.end(), [](const ExecutionTrace& a, const ExecutionTrace& b) {
    if (a.first_start != b.first_start) return a.first_start < b.first_start;
    return a.session_id < b.session_id;
  });
  return traces;
}

std::string emit_csv(const std::vector<LogEvent>& events) {
  std::string out = "start_time,end_time,session_id,class,method\n";
  for (const auto& ev : events) {
    out += format_timestamp(ev.start_time);
    out += ',';
    out += format_timestamp(ev.end_time);
    out += ',';
    out += io::csv_field(ev.session_id);
    out += ',';
    out += io::csv_field(ev.node.container);
    out += ',';
    out += io::csv_field(ev.node.member);
    out += '\n';
  }
  return out;
}

}  // namespace monoslicer::ingest
