#include "stdfg/cli.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stdfg/bundle.hpp"
#include "stdfg/dfg.hpp"
#include "stdfg/error.hpp"
#include "stdfg/mapping.hpp"
#include "stdfg/render.hpp"
#include "stdfg/stats.hpp"
#include "stdfg/tracegen.hpp"

namespace stdfg::cli {
namespace fs = std::filesystem;

std::function<bool(const CaseId&)> case_selector(const std::string& glob) {
  return [glob](const CaseId& id) { return ::fnmatch(glob.c_str(), id.key().c_str(), 0) == 0; };
}

std::vector<std::string> expand_trace_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (!fs::is_directory(in)) {
      out.push_back(in);
      continue;
    }
    std::vector<std::string> found;
    for (const auto& entry : fs::directory_iterator(in))
      if (entry.is_regular_file() && entry.path().extension() == ".st") found.push_back(entry.path().string());
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

IngestResult ingest(const std::vector<std::string>& paths, const CallSet& traced) {
  if (paths.empty()) throw UsageError("no trace files");

  std::vector<std::optional<ParsedCase>> parsed(paths.size());
  std::vector<std::exception_ptr> errors(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      try {
        parsed[i] = parse_trace_path(paths[i], traced);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, paths.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  IngestResult out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    auto& pc = *parsed[i];
    for (const auto& w : pc.warnings) out.warnings.push_back(fmt::format("{}:{}: {}", paths[i], w.line_no, w.message));
    pc.value.source = fs::path(paths[i]).filename().string();
    out.log.add(std::move(pc.value));
  }
  return out;
}

namespace {

struct Options {
  std::vector<std::string> traces;
  std::string bundle;
  std::string mapping;
  std::string filter;
  std::string green;
  std::string red;
  std::string color_by = "rd";
  std::string out_path;
  std::string format;
  std::string timeline;
  std::string stats_out;
  std::string calls;
  bool ascii = false;

  // gen
  std::string spec_path;
  std::string outdir;
  WorkloadSpec workload;
  std::string mode = "FPP";
  std::string interface = "PLAIN";
};

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text)) throw IoFailure(fmt::format("cannot write '{}'", o.out_path));
}

SentinelStyle sentinels(const Options& o) { return o.ascii ? SentinelStyle::Ascii : SentinelStyle::Glyph; }

MappingSpec load_mapping(const Options& o) {
  if (o.mapping.empty()) throw MissingMappingSpec("--mapping <json> is required");
  return MappingSpec::load(o.mapping);
}

EventLog load_log(const Options& o) {
  auto log = read_bundle(o.bundle);
  return o.filter.empty() ? log : filter_events(log, o.filter);
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

void cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  CallSet traced = default_traced_calls();
  if (!o.calls.empty()) {
    traced.clear();
    std::string_view rest = o.calls;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto name = rest.substr(0, comma);
      if (!name.empty()) traced.emplace(name);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }
  auto result = ingest(expand_trace_inputs(o.traces), traced);
  print_warnings(result.warnings, err);
  write_bundle(result.log, o.bundle);
  for (const auto& c : result.log.cases()) out << fmt::format("{}\t{} events\n", c.id.key(), c.events.size());
  out << fmt::format("{} cases, {} events, {} warnings -> {}\n", result.log.size(), result.log.event_count(),
                     result.warnings.size(), o.bundle);
}

void cmd_synthesize(const Options& o, std::ostream& out, std::ostream& err) {
  const auto metric = parse_color_metric(o.color_by);
  const auto spec = load_mapping(o);
  const auto log = load_log(o);
  const auto stats = compute_statistics(spec, log);
  print_warnings(stats.warnings, err);
  const auto dfg = annotate(build_dfg(build_activity_log(spec, log)), stats);
  const auto styled = color_by_stat(dfg, metric);

  const auto format = o.format.empty() ? std::string("dot") : o.format;
  if (format == "dot")
    emit(o, emit_dot(styled, sentinels(o)), out);
  else if (format == "json")
    emit(o, emit_json(styled, sentinels(o)), out);
  else
    emit(o, stats_csv(stats), out);
  if (!o.stats_out.empty()) {
    std::ofstream f(o.stats_out, std::ios::binary | std::ios::trunc);
    if (!f || !(f << stats_csv(stats))) throw IoFailure(fmt::format("cannot write '{}'", o.stats_out));
  }
}

void cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  const auto spec = load_mapping(o);
  const auto log = load_log(o);
  const auto green_log = select_cases(log, case_selector(o.green));
  const auto red_log = select_cases(log, case_selector(o.red));
  if (green_log.empty()) throw EmptySelection(fmt::format("green selector '{}' matches no case", o.green));
  if (red_log.empty()) throw EmptySelection(fmt::format("red selector '{}' matches no case", o.red));
  for (const auto& c : green_log.cases())
    if (red_log.find(c.id))
      throw NotAPartition(fmt::format("case {} matches both --green and --red", c.id.key()));

  const auto stats = compute_statistics(spec, log);
  print_warnings(stats.warnings, err);
  const auto full = annotate(build_dfg(build_activity_log(spec, log)), stats);
  const auto styled = color_by_partition(full, build_dfg(build_activity_log(spec, green_log)),
                                         build_dfg(build_activity_log(spec, red_log)));
  const auto format = o.format.empty() ? std::string("dot") : o.format;
  emit(o, format == "json" ? emit_json(styled, sentinels(o)) : emit_dot(styled, sentinels(o)), out);
}

void cmd_stats(const Options& o, std::ostream& out, std::ostream& err) {
  const auto spec = load_mapping(o);
  const auto log = load_log(o);
  if (!o.timeline.empty()) {
    emit(o, timeline_csv(export_timeline(spec, log, Activity::of(o.timeline))), out);
    return;
  }
  const auto stats = compute_statistics(spec, log);
  print_warnings(stats.warnings, err);
  emit(o, o.format == "json" ? stats_json(stats) : stats_csv(stats), out);
}

void cmd_gen(Options o, std::ostream& out) {
  WorkloadSpec spec = o.workload;
  if (!o.spec_path.empty()) {
    std::ifstream in(o.spec_path);
    if (!in) throw UsageError(fmt::format("cannot read workload spec '{}'", o.spec_path));
    std::ostringstream buf;
    buf << in.rdbuf();
    spec = WorkloadSpec::from_json(buf.str());
  } else {
    spec.mode = o.mode == "SSF" ? FileMode::SSF : FileMode::FPP;
    spec.interface = o.interface == "POSITIONAL" ? IoInterface::Positional : IoInterface::Plain;
  }
  auto run = generate(spec, o.outdir);
  for (const auto& f : run.files) out << (fs::path(o.outdir) / f).string() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesize strace system-call traces into annotated directly-follows graphs", "stdfg"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> formats_graph{"dot", "json", "csv"};

  auto* ingest_cmd = app.add_subcommand("ingest", "Parse <cid>_<host>_<rid>.st trace files into a bundle");
  ingest_cmd->add_option("traces", o.traces, "Trace files or directories")->required();
  ingest_cmd->add_option("--bundle", o.bundle, "Output bundle directory")->required();
  ingest_cmd->add_option("--calls", o.calls, "Comma-separated traced-call allowlist");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--bundle", o.bundle, "Event-log bundle directory")->required();
    cmd->add_option("--mapping", o.mapping, "Mapping spec JSON");
    cmd->add_option("--filter", o.filter, "Keep only events whose path contains this substring");
    cmd->add_option("--out", o.out_path, "Write output to a file instead of stdout");
    cmd->add_flag("--ascii-sentinels", o.ascii, "Render START/END instead of glyphs");
  };

  auto* synth_cmd = app.add_subcommand("synthesize", "Build, annotate and color the DFG");
  add_common(synth_cmd);
  synth_cmd->add_option("--color-by", o.color_by, "Node coloring metric: rd or bytes");
  synth_cmd->add_option("--format", o.format, "dot, json or csv (statistics table)")
      ->check(CLI::IsMember(formats_graph));
  synth_cmd->add_option("--stats-out", o.stats_out, "Also write the statistics table (CSV) here");

  auto* compare_cmd = app.add_subcommand("compare", "Partition-color the DFG of two disjoint case subsets");
  add_common(compare_cmd);
  compare_cmd->add_option("--green", o.green, "Glob over cid:host:rid for the green subset")->required();
  compare_cmd->add_option("--red", o.red, "Glob over cid:host:rid for the red subset")->required();
  compare_cmd->add_option("--format", o.format, "dot or json")->check(CLI::IsMember({"dot", "json"}));

  auto* stats_cmd = app.add_subcommand("stats", "Per-activity statistics table or timeline");
  add_common(stats_cmd);
  stats_cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  stats_cmd->add_option("--timeline", o.timeline, "Export the intervals of one activity as CSV");

  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic IOR-like strace files");
  gen_cmd->add_option("--outdir", o.outdir, "Output directory")->required();
  gen_cmd->add_option("--spec", o.spec_path, "Workload spec JSON (overrides the flags below)");
  gen_cmd->add_option("--processes", o.workload.processes);
  gen_cmd->add_option("--mode", o.mode)->check(CLI::IsMember({"SSF", "FPP"}));
  gen_cmd->add_option("--interface", o.interface)->check(CLI::IsMember({"PLAIN", "POSITIONAL"}));
  gen_cmd->add_option("--segments", o.workload.segments);
  gen_cmd->add_option("--blocks", o.workload.blocks_per_segment);
  gen_cmd->add_option("--op-bytes", o.workload.op_bytes);
  gen_cmd->add_option("--base-path", o.workload.base_path);
  gen_cmd->add_option("--seed", o.workload.seed);
  gen_cmd->add_option("--cid", o.workload.cid);
  gen_cmd->add_option("--host", o.workload.host);
  gen_cmd->add_option("--first-rid", o.workload.first_rid);
  gen_cmd->add_option("--op-latency-us", o.workload.op_latency_us);
  gen_cmd->add_option("--open-latency-us", o.workload.open_latency_us);
  gen_cmd->add_option("--latency-scale", o.workload.latency_scale);
  gen_cmd->add_option("--jitter-us", o.workload.jitter_us);

  std::vector<std::string> argv_store{"stdfg"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest_cmd) cmd_ingest(o, out, err);
    if (*synth_cmd) cmd_synthesize(o, out, err);
    if (*compare_cmd) cmd_compare(o, out, err);
    if (*stats_cmd) cmd_stats(o, out, err);
    if (*gen_cmd) cmd_gen(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace stdfg::cli
