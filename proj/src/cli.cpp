#include "monoslicer/cli.hpp"

#include <atomic>
#include <csignal>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>

#include "monoslicer/decompose.hpp"
#include "monoslicer/graphops.hpp"
#include "monoslicer/ingest.hpp"
#include "monoslicer/io.hpp"
#include "monoslicer/log.hpp"
#include "monoslicer/metrics.hpp"
#include "monoslicer/miner.hpp"
#include "monoslicer/server.hpp"

namespace monoslicer::cli {

namespace {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MetricFlags {
  std::string external_weight = "1000";
  bool include_entrypoints = false;
  std::string link_mode = "services";
  bool no_unassigned_links = false;

  void add_to(CLI::App* app) {
    app->add_option("--external-weight", external_weight, "Weight of one external call in the load metric")
        ->check(CLI::Validator(
            [](std::string& v) -> std::string {
              try {
                return parse_rational(v) > 0 ? "" : "must be positive";
              } catch (const std::invalid_argument&) {
                return "not a number: " + v;
              }
            },
            "RATIONAL", "positive rational"))
        ->capture_default_str();
    app->add_flag("--include-entrypoints", include_entrypoints, "Count entry-point containers as classes");
    app->add_option("--link-mode", link_mode, "How #Links is counted")
        ->check(CLI::IsMember({"services", "call-sites"}))
        ->capture_default_str();
    app->add_flag("--no-unassigned-links", no_unassigned_links,
                  "Do not count calls to unassigned containers as links");
  }

  metrics::MetricsOptions options() const {
    metrics::MetricsOptions o;
    o.external_weight = parse_rational(external_weight);
    o.include_entrypoints = include_entrypoints;
    o.count_unassigned_links = !no_unassigned_links;
    o.link_mode = link_mode == "call-sites" ? metrics::LinkMode::DistinctCallSites : metrics::LinkMode::DistinctServices;
    return o;
  }
};

void emit(const std::string& path, std::string_view content, std::ostream& out) {
  if (path.empty() || path == "-") out << content;
  else io::write_file(path, content);
}

io::json read_json(const std::string& path) {
  try {
    return io::parse_json(io::read_file(path));
  } catch (const io::FormatError& e) {
    throw DataError(path + ": " + e.what());
  }
}

ClassGraph read_graph(const std::string& path) {
  try {
    return io::any_graph_from_json(read_json(path));
  } catch (const io::FormatError& e) {
    throw DataError(path + ": " + e.what());
  }
}

PathFrequencyTable read_table(const std::string& path) {
  try {
    return io::parse_table_csv(io::read_file(path));
  } catch (const io::FormatError& e) {
    throw DataError(path + ": " + e.what());
  }
}

decompose::CandidateSet read_candidates(const std::string& path) {
  try {
    return io::candidate_set_from_json(read_json(path));
  } catch (const io::FormatError& e) {
    throw DataError(path + ": " + e.what());
  }
}

/// Rejects decompositions with error-level violations; logs warnings.
void check_decompositions(const ClassGraph& g, const std::vector<Decomposition>& ds) {
  std::string problems;
  for (const auto& d : ds) {
    for (const auto& v : validate_decomposition(d, g).violations) {
      if (v.severity == Severity::Error) problems += "\n  " + d.id + ": " + v.message;
      else log::get()->warn("{}: {}", d.id, v.message);
    }
  }
  if (!problems.empty()) throw DataError("invalid decomposition(s):" + problems);
}

std::atomic<server::HttpServer*> g_running{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_running.load()) s->stop();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Slice a monolith into candidate microservices from runtime traces.", "monoslicer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "monoslicer 0.1.0");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse a CSV/JSONL log into execution traces");
  std::string ingest_in, ingest_out, ingest_format = "auto", ingest_ts = "auto", ingest_bad = "fail";
  std::optional<int> session_gap;
  std::vector<std::string> entrypoints;
  ingest_cmd->add_option("--in", ingest_in, "Log file")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", ingest_out, "Traces JSON (default stdout)");
  ingest_cmd->add_option("--format", ingest_format)->check(CLI::IsMember({"csv", "jsonl", "auto"}))->capture_default_str();
  ingest_cmd->add_option("--timestamp-format", ingest_ts)
      ->check(CLI::IsMember({"rfc3339", "hms", "hm", "auto"}))
      ->capture_default_str();
  ingest_cmd->add_option("--on-bad-row", ingest_bad)->check(CLI::IsMember({"fail", "skip_and_report"}))->capture_default_str();
  ingest_cmd->add_option("--session-gap", session_gap, "Split a session after this many idle minutes")
      ->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--entrypoint", entrypoints, "Container to treat as an entry point (repeatable)");

  // mine
  auto* mine_cmd = app.add_subcommand("mine", "Count execution paths and build the call graph");
  std::string mine_in, out_table, out_graph, out_class_graph;
  mine_cmd->add_option("--in", mine_in, "Traces JSON")->required()->check(CLI::ExistingFile);
  mine_cmd->add_option("--out-table", out_table, "Path frequency table CSV");
  mine_cmd->add_option("--out-graph", out_graph, "Method-level call graph JSON");
  mine_cmd->add_option("--out-class-graph", out_class_graph, "Class-level graph JSON");

  // cycles
  auto* cycles_cmd = app.add_subcommand("cycles", "Find cyclic dependencies and suggest edges to break");
  std::string cycles_graph, cycles_out, cycles_format = "json";
  bool method_level = false;
  std::size_t max_cycles = graphops::kDefaultMaxCycles;
  cycles_cmd->add_option("--graph", cycles_graph, "Call graph or class graph JSON")->required()->check(CLI::ExistingFile);
  cycles_cmd->add_flag("--method-level", method_level, "Analyse methods instead of classes (needs a call graph)");
  cycles_cmd->add_option("--max-cycles", max_cycles)->check(CLI::PositiveNumber)->capture_default_str();
  cycles_cmd->add_option("--format", cycles_format)->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  cycles_cmd->add_option("--out", cycles_out);

  // propose
  auto* propose_cmd = app.add_subcommand("propose", "Generate candidate decompositions");
  std::string propose_graph, propose_table, propose_user, propose_out;
  decompose::GenerateOptions gen;
  propose_cmd->add_option("--graph", propose_graph)->required()->check(CLI::ExistingFile);
  propose_cmd->add_option("--table", propose_table, "Path frequency table CSV")->required()->check(CLI::ExistingFile);
  propose_cmd->add_option("--max-candidates", gen.max_candidates)->check(CLI::PositiveNumber)->capture_default_str();
  propose_cmd->add_option("--max-shared", gen.max_shared_expansion, "Shared containers to expand into variants")
      ->capture_default_str();
  propose_cmd->add_option("--similarity", gen.path_similarity, "Jaccard threshold for clustering paths")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  propose_cmd->add_option("--user", propose_user, "Decompositions to include first")->check(CLI::ExistingFile);
  propose_cmd->add_option("--out", propose_out);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute CBM, FEC, duplication and load");
  std::string eval_graph, eval_decomps, eval_out, eval_format = "json";
  MetricFlags eval_flags;
  evaluate_cmd->add_option("--graph", eval_graph)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--decompositions", eval_decomps)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--format", eval_format)->check(CLI::IsMember({"json", "csv", "table"}))->capture_default_str();
  evaluate_cmd->add_option("--out", eval_out);
  eval_flags.add_to(evaluate_cmd);

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Evaluate candidates and flag the Pareto front");
  std::string cmp_graph, cmp_candidates, cmp_out, cmp_format = "json";
  MetricFlags cmp_flags;
  compare_cmd->add_option("--graph", cmp_graph)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--candidates", cmp_candidates, "Candidate set or decomposition array")
      ->required()
      ->check(CLI::ExistingFile);
  compare_cmd->add_option("--format", cmp_format)->check(CLI::IsMember({"json", "csv", "table"}))->capture_default_str();
  compare_cmd->add_option("--out", cmp_out);
  cmp_flags.add_to(compare_cmd);

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "Export a graph");
  std::string graph_in, graph_out, graph_name = "g";
  bool dot = false, class_level = false;
  graph_cmd->add_option("--graph", graph_in)->required()->check(CLI::ExistingFile);
  graph_cmd->add_flag("--dot", dot, "Write Graphviz DOT")->required();
  graph_cmd->add_flag("--class-level", class_level, "Collapse a call graph to classes first");
  graph_cmd->add_option("--name", graph_name)->capture_default_str();
  graph_cmd->add_option("--out", graph_out);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve the analysis over HTTP");
  std::string serve_graph, serve_table, serve_candidates, bind = "127.0.0.1:8080", state_file, ui_dir;
  bool cors = false;
  MetricFlags serve_flags;
  std::size_t serve_max_candidates = 50;
  serve_cmd->add_option("--graph", serve_graph)->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--table", serve_table)->check(CLI::ExistingFile);
  serve_cmd->add_option("--candidates", serve_candidates, "Serve these instead of generating candidates")
      ->check(CLI::ExistingFile);
  serve_cmd->add_option("--max-candidates", serve_max_candidates)->check(CLI::PositiveNumber)->capture_default_str();
  serve_cmd->add_option("--max-cycles", max_cycles)->check(CLI::PositiveNumber)->capture_default_str();
  serve_cmd->add_option("--bind", bind, "HOST:PORT (port 0 picks a free one)")->capture_default_str();
  serve_cmd->add_option("--state-file", state_file, "Persist drafts and selection here");
  serve_cmd->add_flag("--cors", cors, "Allow cross-origin requests (local UI development)");
  serve_cmd->add_option("--ui-dir", ui_dir, "Static UI files to serve at /")->check(CLI::ExistingDirectory);
  serve_flags.add_to(serve_cmd);

  std::vector<std::string> argv_store{"monoslicer"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto logger = log::get();
  try {
    if (*ingest_cmd) {
      ingest::IngestConfig cfg;
      cfg.format = ingest_format == "csv" ? ingest::LogFormat::Csv
                   : ingest_format == "jsonl" ? ingest::LogFormat::Jsonl
                                              : ingest::LogFormat::Auto;
      cfg.timestamp_format = ingest_ts == "rfc3339" ? ingest::TimestampFormat::Rfc3339
                             : ingest_ts == "hms"   ? ingest::TimestampFormat::Hms
                             : ingest_ts == "hm"    ? ingest::TimestampFormat::Hm
                                                    : ingest::TimestampFormat::Auto;
      cfg.on_bad_row = ingest_bad == "fail" ? ingest::BadRowPolicy::Fail : ingest::BadRowPolicy::SkipAndReport;
      cfg.session_gap_minutes = session_gap;
      cfg.entrypoints = entrypoints;
      auto parsed = ingest::parse_log(io::read_file(ingest_in), cfg);
      for (const auto& e : parsed.errors)
        err << ingest_in << ":" << e.line << ": skipped (" << ingest::to_string(e.kind) << "): " << e.reason << "\n";
      auto traces = ingest::assemble_traces(parsed.events, cfg);
      logger->info("{} events, {} traces, {} skipped rows", parsed.events.size(), traces.size(), parsed.errors.size());
      emit(ingest_out, io::dump(io::to_json(traces)), out);
    } else if (*mine_cmd) {
      std::vector<ExecutionTrace> traces;
      try {
        traces = io::traces_from_json(read_json(mine_in));
      } catch (const io::FormatError& e) {
        throw DataError(mine_in + ": " + e.what());
      }
      auto table = miner::path_frequency_table(traces);
      auto graph = miner::build_call_graph(table);
      logger->info("{} distinct paths, {} edges", table.size(), graph.edges().size());
      if (out_table.empty() && out_graph.empty() && out_class_graph.empty()) {
        out << io::emit_table_csv(table);
      } else {
        if (!out_table.empty()) emit(out_table, io::emit_table_csv(table), out);
        if (!out_graph.empty()) emit(out_graph, io::dump(io::to_json(graph)), out);
        if (!out_class_graph.empty()) emit(out_class_graph, io::dump(io::to_json(graphops::to_class_graph(graph))), out);
      }
    } else if (*cycles_cmd) {
      ClassGraph g;
      if (method_level) {
        auto doc = read_json(cycles_graph);
        if (!io::is_call_graph_document(doc)) throw DataError("--method-level needs a call graph document");
        try {
          g = graphops::to_method_graph(io::call_graph_from_json(doc));
        } catch (const io::FormatError& e) {
          throw DataError(cycles_graph + ": " + e.what());
        }
      } else {
        g = read_graph(cycles_graph);
      }
      auto report = graphops::find_cycles(g, max_cycles);
      if (report.truncated) logger->warn("cycle listing truncated at {}", max_cycles);
      emit(cycles_out, cycles_format == "text" ? graphops::render_cycle_report(report) : io::dump(io::to_json(report)), out);
    } else if (*propose_cmd) {
      auto g = read_graph(propose_graph);
      auto table = read_table(propose_table);
      if (!propose_user.empty()) {
        try {
          gen.user_specified = decompose::load_decompositions(io::read_file(propose_user));
        } catch (const decompose::DocumentError& e) {
          throw DataError(propose_user + ": " + e.what());
        }
      }
      auto set = decompose::generate_candidates(g, table, gen);
      logger->info("{} candidate(s)", set.candidates.size());
      emit(propose_out, io::dump(io::to_json(set)), out);
    } else if (*evaluate_cmd) {
      auto g = read_graph(eval_graph);
      std::vector<Decomposition> ds;
      try {
        ds = decompose::load_decompositions(io::read_file(eval_decomps));
      } catch (const decompose::DocumentError& e) {
        throw DataError(eval_decomps + ": " + e.what());
      }
      check_decompositions(g, ds);
      std::vector<metrics::Evaluation> es;
      const auto opts = eval_flags.options();
      for (const auto& d : ds) es.push_back(metrics::evaluate(g, d, opts));
      emit(eval_out,
           eval_format == "csv"     ? io::evaluations_csv(es)
           : eval_format == "table" ? io::evaluations_table(es)
                                    : io::dump(io::to_json(es)),
           out);
    } else if (*compare_cmd) {
      auto g = read_graph(cmp_graph);
      auto set = read_candidates(cmp_candidates);
      std::vector<Decomposition> ds;
      for (const auto& c : set.candidates) ds.push_back(c.decomposition);
      check_decompositions(g, ds);
      auto report = metrics::compare(set, g, cmp_flags.options());
      emit(cmp_out,
           cmp_format == "csv"     ? io::comparison_csv(report)
           : cmp_format == "table" ? io::comparison_table(report)
                                   : io::dump(io::to_json(report)),
           out);
    } else if (*graph_cmd) {
      auto doc = read_json(graph_in);
      graphops::DotOptions opts{graph_name};
      std::string text;
      try {
        if (io::is_call_graph_document(doc) && !class_level) text = graphops::export_dot(io::call_graph_from_json(doc), opts);
        else text = graphops::export_dot(io::any_graph_from_json(doc), opts);
      } catch (const io::FormatError& e) {
        throw DataError(graph_in + ": " + e.what());
      }
      emit(graph_out, text, out);
    } else if (*serve_cmd) {
      server::ServeOptions sopts;
      auto colon = bind.rfind(':');
      try {
        if (colon == std::string::npos) throw std::invalid_argument(bind);
        sopts.host = bind.substr(0, colon);
        std::size_t used = 0;
        sopts.port = std::stoi(bind.substr(colon + 1), &used);
        if (used != bind.size() - colon - 1 || sopts.port < 0 || sopts.port > 65535) throw std::invalid_argument(bind);
      } catch (const std::exception&) {
        err << "--bind expects HOST:PORT, got " << bind << "\n";
        return kExitUsage;
      }
      sopts.allow_cors = cors;
      sopts.ui_dir = ui_dir;

      server::Analysis analysis;
      auto doc = read_json(serve_graph);
      try {
        if (io::is_call_graph_document(doc)) {
          analysis.call_graph = io::call_graph_from_json(doc);
          analysis.class_graph = graphops::to_class_graph(*analysis.call_graph);
        } else {
          analysis.class_graph = io::class_graph_from_json(doc);
        }
      } catch (const io::FormatError& e) {
        throw DataError(serve_graph + ": " + e.what());
      }
      if (!serve_table.empty()) analysis.table = read_table(serve_table);
      analysis.cycles = graphops::find_cycles(analysis.class_graph, max_cycles);
      analysis.metrics = serve_flags.options();
      if (!serve_candidates.empty()) {
        analysis.candidates = read_candidates(serve_candidates);
      } else if (!analysis.table.empty() && !analysis.class_graph.nodes().empty()) {
        decompose::GenerateOptions o;
        o.max_candidates = serve_max_candidates;
        analysis.candidates = decompose::generate_candidates(analysis.class_graph, analysis.table, o);
      }

      server::Workspace ws(std::move(analysis), state_file);
      server::HttpServer http(ws, sopts);
      const int port = http.bind();
      out << "listening on http://" << sopts.host << ":" << port << "\n" << std::flush;
      g_running = &http;
      auto old_int = std::signal(SIGINT, on_signal);
      auto old_term = std::signal(SIGTERM, on_signal);
      http.listen();
      g_running = nullptr;
      std::signal(SIGINT, old_int);
      std::signal(SIGTERM, old_term);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace monoslicer::cli
