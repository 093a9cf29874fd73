#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "stdfg/event_log.hpp"
#include "stdfg/trace_parser.hpp"

namespace stdfg::cli {

// Runs the `stdfg` command line. `args` excludes the program name. Returns the
// process exit status: 0 on success, 1 on a hard error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Glob over "cid:host:rid".
std::function<bool(const CaseId&)> case_selector(const std::string& glob);

// Expands directories to the `.st` files they contain, sorted by name.
std::vector<std::string> expand_trace_inputs(const std::vector<std::string>& inputs);

struct IngestResult {
  EventLog log;
  std::vector<std::string> warnings;  // "file:line: message"
};

// Parses every file (concurrently) and assembles the event log. Throws
// UsageError for an empty input set and DuplicateCase for repeated ids.
IngestResult ingest(const std::vector<std::string>& paths, const CallSet& traced = default_traced_calls());

}  // namespace stdfg::cli
