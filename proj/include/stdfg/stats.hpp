#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stdfg/dfg.hpp"
#include "stdfg/mapping.hpp"

namespace stdfg {

struct Interval {
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;

  auto operator<=>(const Interval&) const = default;
  bool operator==(const Interval&) const = default;
};

struct DurationShare {
  double rd = 0.0;
  std::int64_t total_dur_us = 0;
};

// Per mapped activity: summed duration and its fraction of the summed
// duration over all mapped activities. When every mapped duration is zero all
// fractions are 0 and a warning is appended.
std::map<Activity, DurationShare> relative_duration(const MappingSpec& spec, const EventLog& log,
                                                    std::vector<std::string>* warnings = nullptr);

// Sum of `size` over the events mapped to each activity; unsized events add 0.
std::map<Activity, std::int64_t> total_bytes(const MappingSpec& spec, const EventLog& log);

// Arithmetic mean of size/dur (bytes per second) over the mapped events that
// have a size and a non-zero duration. Activities without samples are absent.
std::map<Activity, double> process_data_rate(const MappingSpec& spec, const EventLog& log);

// Sorts by start (ties by end) and returns the longest run of consecutive
// intervals i..j such that the first one ends after the last one starts. A
// single interval always counts as 1; an empty list gives 0.
std::int64_t max_concurrency(std::span<const Interval> intervals);

// Largest number of half-open intervals [start, end) sharing a point, found by
// an endpoint sweep with ends processed before starts. Zero-length intervals
// overlap nothing but still count as 1 on their own.
std::int64_t sweepline_max_overlap(std::span<const Interval> intervals);

struct TimelineRow {
  Interval interval;
  std::string case_key;
  std::int64_t pid = 0;

  bool operator==(const TimelineRow&) const = default;
};

// One row per event mapped to `activity`, sorted by start.
std::vector<TimelineRow> export_timeline(const MappingSpec& spec, const EventLog& log,
                                         const Activity& activity);
// "start_us,end_us,case,pid" CSV.
std::string timeline_csv(const std::vector<TimelineRow>& rows);

struct ActivityStatistics {
  Provenance provenance;
  std::map<Activity, NodeStats> nodes;
  std::vector<std::string> warnings;
};

ActivityStatistics compute_statistics(const MappingSpec& spec, const EventLog& log);

// Copy of `dfg` with NodeStats on every non-sentinel node. Throws SpecMismatch
// when the statistics were not computed from the same mapping and cases.
Dfg annotate(const Dfg& dfg, const ActivityStatistics& stats);

// Table with columns activity, rd, total_dur_us, bytes, data_rate_mean,
// max_concurrency, sample_count.
std::string stats_csv(const ActivityStatistics& stats);
std::string stats_json(const ActivityStatistics& stats);

}  // namespace stdfg
