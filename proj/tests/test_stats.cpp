#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "oracles.hpp"
#include "stdfg/error.hpp"
#include "stdfg/stats.hpp"
#include "test_util.hpp"

using namespace stdfg;
using stdfg::testing::act;
using stdfg::testing::make_event;

namespace {

constexpr std::int64_t MiB = 1024 * 1024;

EventLog one_case(std::vector<Event> events) {
  for (std::size_t i = 0; i < events.size(); ++i) events[i].seq = static_cast<std::int64_t>(i + 1);
  std::stable_sort(events.begin(), events.end(), event_before);
  return EventLog({Case{{"t", "h", 1}, std::move(events), ""}});
}

std::vector<Interval> random_intervals(std::mt19937& rng, std::size_t max_n) {
  std::vector<Interval> out(rng() % (max_n + 1));
  for (auto& t : out) {
    t.start_us = rng() % 30;
    t.end_us = t.start_us + rng() % 12;
  }
  return out;
}

}  // namespace

TEST_CASE("relative_duration") {
  auto log = one_case({make_event("read", "/a", 0, 1), make_event("write", "/b", 5, 3)});
  auto rd = relative_duration(MappingSpec{}, log);
  CHECK(rd.at(act("read:/a")).rd == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rd.at(act("write:/b")).rd == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(rd.at(act("write:/b")).total_dur_us == 3);

  auto single = relative_duration(MappingSpec{}, one_case({make_event("read", "/a", 0, 7)}));
  CHECK(single.at(act("read:/a")).rd == 1.0);

  MappingSpec only_a;
  only_a.path_filter = "/a";
  auto partial = relative_duration(only_a, log);
  CHECK(partial.size() == 1);
  CHECK_FALSE(partial.contains(act("write:/b")));
  CHECK(partial.at(act("read:/a")).rd == 1.0);

  std::vector<std::string> warnings;
  auto zero = relative_duration(MappingSpec{}, one_case({make_event("read", "/a", 0, 0), make_event("lseek", "/b", 1, 0)}),
                                &warnings);
  CHECK(zero.at(act("read:/a")).rd == 0.0);
  CHECK(zero.at(act("lseek:/b")).rd == 0.0);
  CHECK(warnings.size() == 1);
}

TEST_CASE("total_bytes") {
  auto log = one_case({make_event("write", "/f", 0, 1, MiB), make_event("write", "/f", 2, 1, MiB),
                       make_event("write", "/f", 4, 1, MiB), make_event("lseek", "/g", 6, 1)});
  auto bytes = total_bytes(MappingSpec{}, log);
  CHECK(bytes.at(act("write:/f")) == 3'145'728);
  CHECK(bytes.at(act("lseek:/g")) == 0);
  CHECK(total_bytes(MappingSpec{}, EventLog{}).empty());
}

TEST_CASE("process_data_rate") {
  auto log = one_case({make_event("write", "/f", 0, 500'000, MiB), make_event("write", "/f", 1, 250'000, MiB)});
  // 1 MiB / 0.5 s = 2,097,152 B/s and 1 MiB / 0.25 s = 4,194,304 B/s.
  CHECK(process_data_rate(MappingSpec{}, log).at(act("write:/f")) == doctest::Approx(3'145'728.0));

  auto single = one_case({make_event("read", "/f", 0, 1'000'000, 12345)});
  CHECK(process_data_rate(MappingSpec{}, single).at(act("read:/f")) == doctest::Approx(12345.0));

  auto zero = one_case({make_event("read", "/f", 0, 0, 100), make_event("lseek", "/f", 1, 5)});
  CHECK(process_data_rate(MappingSpec{}, zero).empty());
}

TEST_CASE("max_concurrency window rule") {
  CHECK(max_concurrency(std::vector<Interval>{}) == 0);
  CHECK(max_concurrency(std::vector<Interval>{{0, 10}, {5, 12}, {20, 21}}) == 2);
  CHECK(max_concurrency(std::vector<Interval>{{3, 4}}) == 1);
  CHECK(max_concurrency(std::vector<Interval>{{3, 3}}) == 1);
  CHECK(max_concurrency(std::vector<Interval>{{0, 10}, {1, 2}, {3, 4}}) == 3);
  // Touching intervals are not concurrent.
  CHECK(max_concurrency(std::vector<Interval>{{0, 5}, {5, 9}}) == 1);
}

TEST_CASE("sweepline_max_overlap") {
  CHECK(sweepline_max_overlap(std::vector<Interval>{}) == 0);
  CHECK(sweepline_max_overlap(std::vector<Interval>{{0, 10}, {5, 12}, {20, 21}}) == 2);
  CHECK(sweepline_max_overlap(std::vector<Interval>{{0, 1}, {2, 3}, {4, 5}}) == 1);
  CHECK(sweepline_max_overlap(std::vector<Interval>(7, Interval{0, 1})) == 7);
  CHECK(sweepline_max_overlap(std::vector<Interval>{{0, 10}, {1, 2}, {3, 4}}) == 2);
  CHECK(sweepline_max_overlap(std::vector<Interval>{{4, 4}, {4, 4}}) == 1);
}

TEST_CASE("concurrency implementations agree with brute force") {
  std::mt19937 rng(1234);
  int equal_cases = 0;
  for (int round = 0; round < 2000; ++round) {
    auto t = random_intervals(rng, 12);
    const auto window = max_concurrency(t);
    const auto sweep = sweepline_max_overlap(t);
    CHECK(window == oracle::window_concurrency(t));
    CHECK(sweep == oracle::subset_overlap(t));
    CHECK(window >= sweep);
    if (oracle::windows_share_points(t)) {
      CHECK(window == sweep);
      ++equal_cases;
    }
  }
  CHECK(equal_cases > 100);
}

TEST_CASE("export_timeline") {
  auto log = testing::ls_log();
  auto b = select_cases(log, [](const CaseId& id) { return id.cid == "b"; });
  auto rows = export_timeline(MappingSpec{}, b, act("read:/usr/lib"));
  CHECK(rows.size() == 15);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].interval.start_us <= rows[i].interval.start_us);
  CHECK(rows[0].case_key.starts_with("b:host1:"));

  MappingSpec filtered;
  filtered.path_filter = "/etc";
  CHECK(export_timeline(filtered, b, act("read:/usr/lib")).empty());

  auto csv = timeline_csv(rows);
  CHECK(csv.starts_with("start_us,end_us,case,pid\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 16);
}

TEST_CASE("compute_statistics and annotate") {
  const MappingSpec spec;
  auto log = testing::ls_log();
  auto stats = compute_statistics(spec, log);
  auto dfg = annotate(build_dfg(build_activity_log(spec, log)), stats);
  for (const auto& n : dfg.nodes()) {
    if (n.is_sentinel()) {
      CHECK(dfg.stats_for(n) == nullptr);
    } else {
      REQUIRE(dfg.stats_for(n) != nullptr);
      CHECK(dfg.stats_for(n)->max_concurrency <= dfg.stats_for(n)->sample_count);
    }
  }
  CHECK(dfg.stats_for(act("read:/usr/lib"))->sample_count == 24);
  CHECK(dfg.stats_for(act("read:/usr/lib"))->bytes == 24 * 832);

  auto doc = nlohmann::json::parse(to_json(dfg));
  for (const auto& node : doc["nodes"]) {
    CHECK(node.contains("load") == !node.contains("sentinel"));
    CHECK(node.contains("dr") == !node.contains("sentinel"));
  }

  MappingSpec other;
  other.depth = 1;
  CHECK_THROWS_AS(annotate(dfg, compute_statistics(other, log)), SpecMismatch);
  auto a = select_cases(log, [](const CaseId& id) { return id.cid == "a"; });
  CHECK_THROWS_AS(annotate(dfg, compute_statistics(spec, a)), SpecMismatch);
}

TEST_CASE("multi-host logs warn about clock skew") {
  EventLog log({Case{{"a", "h1", 1}, {make_event("read", "/x", 0, 1)}, ""},
                Case{{"a", "h2", 1}, {make_event("read", "/x", 0, 1)}, ""}});
  auto stats = compute_statistics(MappingSpec{}, log);
  CHECK(stats.warnings.size() == 1);
  CHECK(compute_statistics(MappingSpec{}, testing::ls_log()).warnings.empty());
}

TEST_CASE("statistics invariants on random event logs") {
  std::mt19937 rng(77);
  const std::vector<std::string> paths{"/a/b/c", "/a/x", "/d", "/e/f/g/h"};
  for (int round = 0; round < 200; ++round) {
    std::vector<Case> cases;
    const int n_cases = 1 + static_cast<int>(rng() % 4);
    for (int c = 0; c < n_cases; ++c) {
      Case cs{{"r", "h", c + 1}, {}, ""};
      std::int64_t t = 0;
      const int n = static_cast<int>(rng() % 10);
      for (int i = 0; i < n; ++i) {
        auto e = make_event(rng() % 2 ? "read" : "write", paths[rng() % paths.size()], t, rng() % 1000,
                            rng() % 2 ? std::optional<std::int64_t>(rng() % 5000) : std::nullopt, i + 1);
        e.rid = c + 1;
        e.cid = "r";
        t += rng() % 50;
        cs.events.push_back(e);
      }
      cases.push_back(cs);
    }
    EventLog log(cases);
    MappingSpec spec;
    spec.depth = 1 + static_cast<int>(rng() % 3);
    auto stats = compute_statistics(spec, log);
    double sum = 0.0;
    std::int64_t total_dur = 0;
    for (const auto& [_, s] : stats.nodes) {
      sum += s.rd;
      total_dur += s.total_dur_us;
      CHECK(s.max_concurrency <= s.sample_count);
    }
    if (total_dur > 0) CHECK(std::abs(sum - 1.0) < 1e-9);

    std::shuffle(cases.begin(), cases.end(), rng);
    auto reordered = compute_statistics(spec, EventLog(cases));
    CHECK(reordered.nodes == stats.nodes);
  }
}

TEST_CASE("stats table output") {
  auto stats = compute_statistics(MappingSpec{}, testing::ls_log());
  auto csv = stats_csv(stats);
  CHECK(csv.starts_with("activity,rd,total_dur_us,bytes,data_rate_mean,max_concurrency,sample_count\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(stats.nodes.size() + 1));
  auto doc = nlohmann::json::parse(stats_json(stats));
  CHECK(doc.size() == stats.nodes.size());
  CHECK(doc[0].contains("max_concurrency"));
}
