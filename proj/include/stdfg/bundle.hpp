#pragma once

#include <filesystem>

#include "stdfg/event_log.hpp"

namespace stdfg {

// On-disk event-log bundle:
//
//   <dir>/manifest.json            [{cid, host, rid, file, event_count, source}, ...]
//   <dir>/cases/<cid>_<host>_<rid>.csv
//
// Case files carry the header `seq,pid,call,start_us,dur_us,fp,size`, one row
// per event in (start_us, seq) order. `fp` uses RFC-4180 quoting and `size` is
// empty when absent. Case files are written before the manifest.
void write_bundle(const EventLog& log, const std::filesystem::path& dir);

// Throws CorruptBundle on any structural inconsistency.
EventLog read_bundle(const std::filesystem::path& dir);

namespace csv {

std::string quote(std::string_view field);

// Splits RFC-4180 text into records. Quoted fields may span lines. Throws
// CorruptBundle on an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace csv
}  // namespace stdfg
