#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stdfg/event_log.hpp"

namespace stdfg {

struct FileNameMeta {
  std::string cid;
  std::string host;
  std::int64_t rid = 0;

  bool operator==(const FileNameMeta&) const = default;
  CaseId case_id() const { return {cid, host, rid}; }
};

// Splits "<cid>_<host>_<rid>.st" on its last two underscores. Accepts a bare
// file name or a path. Throws MalformedName.
FileNameMeta parse_filename(std::string_view name);

enum class RecordKind { Complete, Unfinished, Resumed, Skip };

struct RawRecord {
  std::int64_t pid = 0;
  std::int64_t wallclock = 0;  // µs since midnight
  std::string callname;
  std::optional<std::string> fd_path;
  std::optional<std::string> quoted_path;  // first quoted string argument
  std::string args_tail;
  std::optional<std::int64_t> retval;
  std::optional<std::int64_t> dur;
  RecordKind kind = RecordKind::Skip;
  std::int64_t line_no = 0;

  bool operator==(const RawRecord&) const = default;
};

// Calls that produce Events; anything else is skipped.
using CallSet = std::set<std::string, std::less<>>;
const CallSet& default_traced_calls();

// True for read/write variants, whose return value is a byte count.
bool is_transfer_call(std::string_view call);

// Parses one line of `strace -f -tt -T -y` output. Throws MalformedLine for a
// complete-looking record without timestamp or return section, and MissingPid
// when the line carries no pid prefix.
RawRecord parse_line(std::string_view line, const CallSet& traced = default_traced_calls());

struct Warning {
  std::int64_t line_no = 0;
  std::string message;
};

// Pairs each Unfinished record with the next Resumed record of the same pid
// and call. Orphans are dropped with a warning appended to `warnings`.
std::vector<RawRecord> merge_unfinished_resumed(const std::vector<RawRecord>& records,
                                                std::vector<Warning>& warnings);

struct ParsedCase {
  Case value;
  std::vector<Warning> warnings;
};

// Builds the time-ordered Case for one trace file. MalformedLine errors are
// rethrown with the 1-based line number prepended.
ParsedCase parse_trace_file(const FileNameMeta& meta, const std::vector<std::string>& lines,
                            const CallSet& traced = default_traced_calls());

// Reads and parses a file from disk; the name supplies the case id.
ParsedCase parse_trace_path(const std::string& path,
                            const CallSet& traced = default_traced_calls());

// Renders an Event as a canonical complete strace line that parse_line maps
// back to the same fields.
std::string render_line(const Event& e);

// "HH:MM:SS.ffffff" for a µs-since-midnight value (wraps past 24 h).
std::string format_wallclock(std::int64_t us);

}  // namespace stdfg
