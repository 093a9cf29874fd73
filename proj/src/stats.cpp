#include "stdfg/stats.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "stdfg/bundle.hpp"
#include "stdfg/error.hpp"

namespace stdfg {
namespace {

constexpr double kMicrosPerSecond = 1e6;

template <typename Fn>
void for_each_mapped(const MappingSpec& spec, const EventLog& log, Fn&& fn) {
  for (const auto& c : log.cases())
    for (const auto& e : c.events)
      if (auto a = apply_mapping(spec, e)) fn(*a, c, e);
}

std::vector<Interval> sorted_by_start(std::span<const Interval> intervals) {
  std::vector<Interval> out(intervals.begin(), intervals.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::map<Activity, DurationShare> relative_duration(const MappingSpec& spec, const EventLog& log,
                                                    std::vector<std::string>* warnings) {
  std::map<Activity, DurationShare> out;
  std::int64_t grand_total = 0;
  for_each_mapped(spec, log, [&](const Activity& a, const Case&, const Event& e) {
    out[a].total_dur_us += e.dur;
    grand_total += e.dur;
  });
  if (grand_total == 0) {
    if (!out.empty() && warnings)
      warnings->push_back("all mapped durations are zero; relative durations set to 0");
    return out;
  }
  for (auto& [_, share] : out)
    share.rd = static_cast<double>(share.total_dur_us) / static_cast<double>(grand_total);
  return out;
}

std::map<Activity, std::int64_t> total_bytes(const MappingSpec& spec, const EventLog& log) {
  std::map<Activity, std::int64_t> out;
  for_each_mapped(spec, log,
                  [&](const Activity& a, const Case&, const Event& e) { out[a] += e.size.value_or(0); });
  return out;
}

std::map<Activity, double> process_data_rate(const MappingSpec& spec, const EventLog& log) {
  std::map<Activity, std::pair<double, std::int64_t>> sums;
  for_each_mapped(spec, log, [&](const Activity& a, const Case&, const Event& e) {
    if (!e.size || e.dur <= 0) return;
    auto& [sum, n] = sums[a];
    sum += static_cast<double>(*e.size) * kMicrosPerSecond / static_cast<double>(e.dur);
    ++n;
  });
  std::map<Activity, double> out;
  for (const auto& [a, s] : sums) out[a] = s.first / static_cast<double>(s.second);
  return out;
}

std::int64_t max_concurrency(std::span<const Interval> intervals) {
  if (intervals.empty()) return 0;
  const auto sorted = sorted_by_start(intervals);
  std::vector<std::int64_t> starts;
  starts.reserve(sorted.size());
  for (const auto& t : sorted) starts.push_back(t.start_us);

  std::int64_t best = 1;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // Starts are sorted, so every j with start_j < end_i forms a contiguous
    // run after i.
    auto last = std::lower_bound(starts.begin() + static_cast<std::ptrdiff_t>(i), starts.end(),
                                 sorted[i].end_us);
    auto run = last - (starts.begin() + static_cast<std::ptrdiff_t>(i));
    best = std::max<std::int64_t>(best, run);
  }
  return best;
}

std::int64_t sweepline_max_overlap(std::span<const Interval> intervals) {
  if (intervals.empty()) return 0;
  std::vector<std::pair<std::int64_t, int>> points;
  points.reserve(intervals.size() * 2);
  for (const auto& t : intervals) {
    if (t.end_us <= t.start_us) continue;
    points.emplace_back(t.start_us, +1);
    points.emplace_back(t.end_us, -1);
  }
  // (x, -1) sorts before (x, +1): touching intervals do not overlap.
  std::sort(points.begin(), points.end());
  std::int64_t open = 0, best = 1;
  for (const auto& [_, delta] : points) {
    open += delta;
    best = std::max(best, open);
  }
  return best;
}

std::vector<TimelineRow> export_timeline(const MappingSpec& spec, const EventLog& log,
                                         const Activity& activity) {
  std::vector<TimelineRow> rows;
  for_each_mapped(spec, log, [&](const Activity& a, const Case& c, const Event& e) {
    if (a == activity) rows.push_back({{e.start, e.start + e.dur}, c.id.key(), e.pid});
  });
  std::stable_sort(rows.begin(), rows.end(), [](const TimelineRow& x, const TimelineRow& y) {
    return x.interval.start_us < y.interval.start_us;
  });
  return rows;
}

std::string timeline_csv(const std::vector<TimelineRow>& rows) {
  std::string out = "start_us,end_us,case,pid\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{}\n", r.interval.start_us, r.interval.end_us, r.case_key, r.pid);
  return out;
}

ActivityStatistics compute_statistics(const MappingSpec& spec, const EventLog& log) {
  ActivityStatistics out;
  out.provenance = provenance_of(spec, log);

  std::set<std::string> hosts;
  for (const auto& c : log.cases()) hosts.insert(c.id.host);
  if (hosts.size() > 1)
    out.warnings.push_back(fmt::format(
        "event log spans {} hosts; max-concurrency assumes synchronized clocks", hosts.size()));

  const auto durations = relative_duration(spec, log, &out.warnings);
  const auto bytes = total_bytes(spec, log);
  const auto rates = process_data_rate(spec, log);

  std::map<Activity, std::vector<Interval>> timelines;
  for_each_mapped(spec, log, [&](const Activity& a, const Case&, const Event& e) {
    timelines[a].push_back({e.start, e.start + e.dur});
  });

  for (const auto& [a, intervals] : timelines) {
    NodeStats s;
    const auto& share = durations.at(a);
    s.rd = share.rd;
    s.total_dur_us = share.total_dur_us;
    s.bytes = bytes.at(a);
    if (auto it = rates.find(a); it != rates.end()) s.data_rate_mean = it->second;
    s.max_concurrency = max_concurrency(intervals);
    s.sample_count = static_cast<std::int64_t>(intervals.size());
    out.nodes.emplace(a, s);
  }
  return out;
}

Dfg annotate(const Dfg& dfg, const ActivityStatistics& stats) {
  if (dfg.provenance() != stats.provenance)
    throw SpecMismatch("statistics and graph were derived from different mappings or case sets");
  Dfg out = dfg;
  for (const auto& n : dfg.nodes()) {
    if (n.is_sentinel()) continue;
    auto it = stats.nodes.find(n);
    out.set_stats(n, it == stats.nodes.end() ? NodeStats{} : it->second);
  }
  return out;
}

std::string stats_csv(const ActivityStatistics& stats) {
  std::string out = "activity,rd,total_dur_us,bytes,data_rate_mean,max_concurrency,sample_count\n";
  for (const auto& [a, s] : stats.nodes) {
    out += fmt::format("{},{:.9f},{},{},{},{},{}\n", csv::quote(a.label), s.rd, s.total_dur_us, s.bytes,
                       s.data_rate_mean ? fmt::format("{:.3f}", *s.data_rate_mean) : std::string{},
                       s.max_concurrency, s.sample_count);
  }
  return out;
}

std::string stats_json(const ActivityStatistics& stats) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& [a, s] : stats.nodes) {
    rows.push_back({{"activity", a.label},
                    {"rd", s.rd},
                    {"total_dur_us", s.total_dur_us},
                    {"bytes", s.bytes},
                    {"data_rate_mean", s.data_rate_mean ? nlohmann::ordered_json(*s.data_rate_mean)
                                                        : nlohmann::ordered_json(nullptr)},
                    {"max_concurrency", s.max_concurrency},
                    {"sample_count", s.sample_count}});
  }
  return rows.dump(2) + "\n";
}

}  // namespace stdfg
