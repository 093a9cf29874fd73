#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace stdfg {

enum class FileMode { SSF, FPP };          // single shared file / file per process
enum class IoInterface { Plain, Positional };  // read/write + lseek, or pread64/pwrite64

// Synthetic IOR-like workload. Each process opens its target, writes
// segments x blocks_per_segment operations of op_bytes, reopens and reads the
// same amount back. Timings are latency * latency_scale * U(0.9, 1.1).
struct WorkloadSpec {
  int processes = 4;
  FileMode mode = FileMode::FPP;
  IoInterface interface = IoInterface::Plain;
  int segments = 1;
  int blocks_per_segment = 2;
  std::int64_t op_bytes = 1024;
  std::string base_path = "/scratch/u1";
  std::uint64_t seed = 1;

  std::string cid = "ior";
  std::string host = "host1";
  std::int64_t first_rid = 1000;
  std::int64_t op_latency_us = 200;
  std::int64_t open_latency_us = 500;
  std::int64_t seek_latency_us = 2;
  double latency_scale = 1.0;
  std::int64_t jitter_us = 50;
  std::int64_t gap_us = 10;
  bool read_phase = true;
  bool preamble = true;  // two small library reads under /usr/lib

  // Throws UsageError for counts < 1 or invalid names.
  void validate() const;
  std::string target_path(int process) const;
  std::string to_json() const;
  static WorkloadSpec from_json(std::string_view text);
};

struct ActivityTruth {
  std::int64_t bytes = 0;
  std::int64_t ops = 0;

  bool operator==(const ActivityTruth&) const = default;
};

// Keyed by "<call>:<full path>".
using TruthTable = std::map<std::string, ActivityTruth>;

struct GeneratedRun {
  std::vector<std::string> files;            // trace file names, in process order
  std::map<std::string, TruthTable> per_file;
  TruthTable totals;
};

// Renders every trace in memory; file name -> lines.
std::map<std::string, std::vector<std::string>> render_workload(const WorkloadSpec& spec,
                                                                GeneratedRun* truth = nullptr);

// Writes the traces and `ground_truth.json` into `outdir`. Throws IoFailure.
GeneratedRun generate(const WorkloadSpec& spec, const std::filesystem::path& outdir);

std::string ground_truth_json(const GeneratedRun& run);

}  // namespace stdfg
