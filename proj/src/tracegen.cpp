#include "stdfg/tracegen.hpp"

#include <fstream>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "stdfg/error.hpp"
#include "stdfg/trace_parser.hpp"

namespace stdfg {
namespace {

constexpr std::int64_t kStartOfDay = 10LL * 3600 * 1'000'000;  // 10:00:00

// mt19937_64 output is fixed by the standard; distributions are not, so the
// scaling is done by hand to keep output identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::int64_t below(std::int64_t n) {
    return n <= 0 ? 0 : static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(n));
  }

 private:
  std::mt19937_64 engine_;
};

class TraceWriter {
 public:
  TraceWriter(std::int64_t pid, std::int64_t clock, TruthTable& truth)
      : pid_(pid), clock_(clock), truth_(truth) {}

  void emit(std::string_view call, const std::string& path, std::string_view args,
            std::int64_t ret, std::int64_t dur, std::int64_t gap, bool counts_bytes) {
    lines_.push_back(fmt::format("{} {} {}({}) = {} <{}.{:06}>", pid_, format_wallclock(clock_), call,
                                 args, ret, dur / 1'000'000, dur % 1'000'000));
    auto& t = truth_[fmt::format("{}:{}", call, path)];
    ++t.ops;
    if (counts_bytes) t.bytes += ret;
    clock_ += dur + gap;
  }

  std::vector<std::string> take() { return std::move(lines_); }

 private:
  std::int64_t pid_;
  std::int64_t clock_;
  TruthTable& truth_;
  std::vector<std::string> lines_;
};

template <typename E, std::size_t N>
void enum_from_json(const nlohmann::json& j, E& out, const std::pair<E, const char*> (&names)[N]) {
  if (j.is_string()) {
    for (const auto& [value, name] : names) {
      if (j.get<std::string>() == name) {
        out = value;
        return;
      }
    }
  }
  throw UsageError(fmt::format("bad workload spec: unknown value {}", j.dump()));
}

constexpr std::pair<FileMode, const char*> kModeNames[] = {{FileMode::SSF, "SSF"}, {FileMode::FPP, "FPP"}};
constexpr std::pair<IoInterface, const char*> kInterfaceNames[] = {{IoInterface::Plain, "PLAIN"},
                                                                   {IoInterface::Positional, "POSITIONAL"}};

const char* enum_name(FileMode m) { return m == FileMode::SSF ? "SSF" : "FPP"; }
const char* enum_name(IoInterface i) { return i == IoInterface::Plain ? "PLAIN" : "POSITIONAL"; }

}  // namespace

void WorkloadSpec::validate() const {
  if (processes < 1 || segments < 1 || blocks_per_segment < 1 || op_bytes < 1)
    throw UsageError("processes, segments, blocks_per_segment and op_bytes must be >= 1");
  if (cid.empty() || host.empty() || cid.find('_') != std::string::npos ||
      host.find('_') != std::string::npos)
    throw UsageError("cid and host must be non-empty and free of '_'");
  if (first_rid < 1) throw UsageError("first_rid must be >= 1");
  if (latency_scale <= 0.0) throw UsageError("latency_scale must be positive");
  if (base_path.empty() || base_path.front() != '/') throw UsageError("base_path must be absolute");
}

std::string WorkloadSpec::target_path(int process) const {
  if (mode == FileMode::SSF) return base_path + "/ssf/testfile";
  return fmt::format("{}/fpp/testfile.{:08}", base_path, process);
}

std::string WorkloadSpec::to_json() const {
  nlohmann::ordered_json doc{{"processes", processes},
                             {"mode", enum_name(mode)},
                             {"interface", enum_name(interface)},
                             {"segments", segments},
                             {"blocks_per_segment", blocks_per_segment},
                             {"op_bytes", op_bytes},
                             {"base_path", base_path},
                             {"seed", seed},
                             {"cid", cid},
                             {"host", host},
                             {"first_rid", first_rid},
                             {"op_latency_us", op_latency_us},
                             {"open_latency_us", open_latency_us},
                             {"seek_latency_us", seek_latency_us},
                             {"latency_scale", latency_scale},
                             {"jitter_us", jitter_us},
                             {"gap_us", gap_us},
                             {"read_phase", read_phase},
                             {"preamble", preamble}};
  return doc.dump(2) + "\n";
}

WorkloadSpec WorkloadSpec::from_json(std::string_view text) {
  WorkloadSpec spec;
  try {
    auto doc = nlohmann::json::parse(text);
    auto get = [&](const char* key, auto& field) {
      if (doc.contains(key)) doc.at(key).get_to(field);
    };
    get("processes", spec.processes);
    if (doc.contains("mode")) enum_from_json(doc.at("mode"), spec.mode, kModeNames);
    if (doc.contains("interface")) enum_from_json(doc.at("interface"), spec.interface, kInterfaceNames);
    get("segments", spec.segments);
    get("blocks_per_segment", spec.blocks_per_segment);
    get("op_bytes", spec.op_bytes);
    get("base_path", spec.base_path);
    get("seed", spec.seed);
    get("cid", spec.cid);
    get("host", spec.host);
    get("first_rid", spec.first_rid);
    get("op_latency_us", spec.op_latency_us);
    get("open_latency_us", spec.open_latency_us);
    get("seek_latency_us", spec.seek_latency_us);
    get("latency_scale", spec.latency_scale);
    get("jitter_us", spec.jitter_us);
    get("gap_us", spec.gap_us);
    get("read_phase", spec.read_phase);
    get("preamble", spec.preamble);
  } catch (const nlohmann::json::exception& err) {
    throw UsageError(fmt::format("bad workload spec: {}", err.what()));
  }
  spec.validate();
  return spec;
}

std::map<std::string, std::vector<std::string>> render_workload(const WorkloadSpec& spec,
                                                                GeneratedRun* truth) {
  spec.validate();
  Rng rng(spec.seed);
  std::map<std::string, std::vector<std::string>> out;
  GeneratedRun local;
  GeneratedRun& run = truth ? *truth : local;
  run = {};

  auto scaled = [&](std::int64_t latency) {
    const double factor = spec.latency_scale * (0.9 + 0.2 * rng.unit());
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(static_cast<double>(latency) * factor));
  };

  const bool positional = spec.interface == IoInterface::Positional;
  for (int p = 0; p < spec.processes; ++p) {
    const auto rid = spec.first_rid + p;
    const auto name = fmt::format("{}_{}_{}.st", spec.cid, spec.host, rid);
    auto& table = run.per_file[name];
    TraceWriter w(rid + 1, kStartOfDay + rng.below(spec.jitter_us + 1), table);

    if (spec.preamble) {
      for (const char* lib : {"/usr/lib/x86_64-linux-gnu/libc.so.6", "/usr/lib/x86_64-linux-gnu/libm.so.6"}) {
        w.emit("read", lib, fmt::format("3<{}>, \"\\177ELF\\2\\1\\1\"..., 832", lib), 832, scaled(5),
               spec.gap_us, true);
      }
    }

    const auto path = spec.target_path(p);
    const std::int64_t per_segment = spec.blocks_per_segment * spec.op_bytes;
    auto phase = [&](std::string_view call, std::string_view flags) {
      w.emit("openat", path, fmt::format("AT_FDCWD, \"{}\", {}", path, flags), 3,
             scaled(spec.open_latency_us), spec.gap_us, false);
      for (int s = 0; s < spec.segments; ++s) {
        for (int b = 0; b < spec.blocks_per_segment; ++b) {
          const std::int64_t offset =
              spec.mode == FileMode::SSF
                  ? (static_cast<std::int64_t>(s) * spec.processes + p) * per_segment + b * spec.op_bytes
                  : static_cast<std::int64_t>(s) * per_segment + b * spec.op_bytes;
          if (positional) {
            w.emit(fmt::format("p{}64", call), path,
                   fmt::format("3<{}>, \"\\0\\0\\0\\0\"..., {}, {}", path, spec.op_bytes, offset),
                   spec.op_bytes, scaled(spec.op_latency_us), spec.gap_us, true);
          } else {
            w.emit("lseek", path, fmt::format("3<{}>, {}, SEEK_SET", path, offset), offset,
                   scaled(spec.seek_latency_us), spec.gap_us, false);
            w.emit(call, path, fmt::format("3<{}>, \"\\0\\0\\0\\0\"..., {}", path, spec.op_bytes),
                   spec.op_bytes, scaled(spec.op_latency_us), spec.gap_us, true);
          }
        }
      }
    };
    phase("write", "O_WRONLY|O_CREAT, 0664");
    if (spec.read_phase) phase("read", "O_RDONLY");

    out[name] = w.take();
    run.files.push_back(name);
    for (const auto& [activity, t] : table) {
      auto& total = run.totals[activity];
      total.bytes += t.bytes;
      total.ops += t.ops;
    }
  }
  return out;
}

GeneratedRun generate(const WorkloadSpec& spec, const std::filesystem::path& outdir) {
  GeneratedRun run;
  auto traces = render_workload(spec, &run);
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw IoFailure(fmt::format("cannot create '{}': {}", outdir.string(), ec.message()));
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) throw IoFailure(fmt::format("cannot write '{}'", path.string()));
  };
  for (const auto& [name, lines] : traces) {
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    write(outdir / name, text);
  }
  write(outdir / "ground_truth.json", ground_truth_json(run));
  return run;
}

std::string ground_truth_json(const GeneratedRun& run) {
  auto table_json = [](const TruthTable& t) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& [a, v] : t) doc[a] = {{"bytes", v.bytes}, {"ops", v.ops}};
    return doc;
  };
  nlohmann::ordered_json doc;
  doc["files"] = nlohmann::ordered_json::array();
  for (const auto& name : run.files)
    doc["files"].push_back({{"file", name}, {"activities", table_json(run.per_file.at(name))}});
  doc["totals"] = table_json(run.totals);
  return doc.dump(2) + "\n";
}

}  // namespace stdfg
