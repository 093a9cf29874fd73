#include <doctest.h>

#include <regex>

#include <json.hpp>

#include "stdfg/error.hpp"
#include "stdfg/render.hpp"
#include "stdfg/stats.hpp"
#include "test_util.hpp"

using namespace stdfg;
using stdfg::testing::act;

namespace {

EventLog by_cid(const EventLog& log, const std::string& cid) {
  return select_cases(log, [&](const CaseId& id) { return id.cid == cid; });
}

Dfg annotated(const MappingSpec& spec, const EventLog& log) {
  return annotate(build_dfg(build_activity_log(spec, log)), compute_statistics(spec, log));
}

Dfg stats_graph(const std::vector<std::pair<std::string, double>>& rds) {
  Dfg g;
  Activity prev = Activity::start();
  for (const auto& [label, rd] : rds) {
    g.add_edge(prev, act(label), 1);
    NodeStats s;
    s.rd = rd;
    s.bytes = static_cast<std::int64_t>(rd * 1000);
    g.set_stats(act(label), s);
    prev = act(label);
  }
  g.add_edge(prev, Activity::end(), 1);
  return g;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("ramp_steps uses mid-ranks") {
  CHECK(ramp_steps({0.9, 0.1}) == std::vector<int>{4, 0});
  CHECK(ramp_steps({0.3, 0.3, 0.3}) == std::vector<int>{2, 2, 2});
  CHECK(ramp_steps({0.5}) == std::vector<int>{2});
  CHECK(ramp_steps({1, 2, 3, 4, 5}) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(ramp_steps({}).empty());
}

TEST_CASE("color_by_stat") {
  auto g = color_by_stat(stats_graph({{"a", 0.9}, {"b", 0.1}}), ColorMetric::Rd);
  CHECK(g.node_fill.at(act("a")) == palette::kRamp[4]);
  CHECK(g.node_fill.at(act("b")) == palette::kRamp[0]);
  CHECK(g.node_fill.at(Activity::start()) == palette::kGray);
  CHECK(g.node_fill.at(Activity::end()) == palette::kGray);

  auto tied = color_by_stat(stats_graph({{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}}), ColorMetric::Rd);
  for (const char* n : {"a", "b", "c", "d"}) CHECK(tied.node_fill.at(act(n)) == palette::kRamp[2]);

  auto by_bytes = color_by_stat(stats_graph({{"a", 0.9}, {"b", 0.1}}), ColorMetric::Bytes);
  CHECK(by_bytes.node_fill.at(act("a")) == palette::kRamp[4]);

  Dfg bare;
  bare.add_edge(Activity::start(), act("x"), 1);
  CHECK_THROWS_AS(color_by_stat(bare, ColorMetric::Rd), MissingStats);
  CHECK_THROWS_AS(parse_color_metric("load"), UsageError);
}

TEST_CASE("stat coloring is monotone and scale invariant") {
  auto log = testing::ls_log();
  const MappingSpec spec;
  auto styled = color_by_stat(annotated(spec, log), ColorMetric::Rd);
  auto shade = [](const std::string& hex) {
    for (int i = 0; i < 5; ++i)
      if (palette::kRamp[i] == hex) return i;
    return -1;
  };
  const auto& stats = styled.dfg.stats();
  for (const auto& [a1, s1] : stats)
    for (const auto& [a2, s2] : stats)
      if (s1.rd > s2.rd) CHECK(shade(styled.node_fill.at(a1)) >= shade(styled.node_fill.at(a2)));

  std::vector<Case> scaled = log.cases();
  for (auto& c : scaled)
    for (auto& e : c.events) e.dur *= 7;
  auto rescaled = color_by_stat(annotated(spec, EventLog(scaled)), ColorMetric::Rd);
  CHECK(rescaled.node_fill == styled.node_fill);
}

TEST_CASE("color_by_partition on ls vs ls -l") {
  auto log = testing::ls_log();
  const MappingSpec spec;
  auto full = annotated(spec, log);
  auto green = build_dfg(build_activity_log(spec, by_cid(log, "a")));
  auto red = build_dfg(build_activity_log(spec, by_cid(log, "b")));
  auto styled = color_by_partition(full, green, red);

  std::set<Edge> green_edges;
  for (const auto& [e, c] : styled.edge_color)
    if (c == palette::kGreen) green_edges.insert(e);
  CHECK(green_edges == std::set<Edge>{{act("read:/etc/locale.alias"), act("write:/dev/pts")}});
  for (const auto& [n, c] : styled.node_fill) {
    CHECK(c != palette::kGreen);
    // Never color an element present in both subsets.
    if (green.contains(n) && red.contains(n)) CHECK(c == palette::kWhite);
  }
  CHECK(styled.node_fill.at(act("read:/etc/passwd")) == palette::kRed);

  SUBCASE("green subset equal to the full log colors everything green") {
    auto all = color_by_partition(full, build_dfg(build_activity_log(spec, log)), Dfg{});
    for (const auto& [_, c] : all.node_fill) CHECK(c == palette::kGreen);
    for (const auto& [_, c] : all.edge_color) CHECK(c == palette::kGreen);
  }
  SUBCASE("identical behavior colors nothing") {
    auto a = by_cid(log, "a");
    auto g1 = build_dfg(build_activity_log(spec, select_cases(a, [](const CaseId& id) { return id.rid == 9042; })));
    auto g2 = build_dfg(build_activity_log(spec, select_cases(a, [](const CaseId& id) { return id.rid != 9042; })));
    auto s = color_by_partition(annotated(spec, a), g1, g2);
    for (const auto& [_, c] : s.node_fill) CHECK(c == palette::kWhite);
    for (const auto& [_, c] : s.edge_color) CHECK(c == palette::kEdge);
  }
  SUBCASE("errors") {
    MappingSpec other;
    other.depth = 3;
    CHECK_THROWS_AS(color_by_partition(full, build_dfg(build_activity_log(other, by_cid(log, "a"))), red),
                    SpecMismatch);
    CHECK_THROWS_AS(color_by_partition(full, green, build_dfg(build_activity_log(spec, log))), NotAPartition);
  }
}

TEST_CASE("emit_dot") {
  auto log = testing::ls_log();
  const MappingSpec spec;
  auto a = by_cid(log, "a");
  auto styled = color_by_stat(annotated(spec, a), ColorMetric::Rd);
  auto dot = emit_dot(styled);
  CHECK(dot.starts_with("digraph dfg {\n"));
  CHECK(dot.ends_with("}\n"));
  CHECK(count_of(dot, " -> ") == 8);
  CHECK(count_of(dot, "fillcolor=") == 6);
  CHECK(dot.find("label=\"•\"") != std::string::npos);
  CHECK(dot.find("label=\"■\"") != std::string::npos);
  CHECK(std::regex_search(dot, std::regex(R"(label="read:/usr/lib\\nLoad: [0-9]+\.[0-9]{2}% \(7488\)\\nDR: [0-9]+ x [0-9]+\.[0-9]{2} MiB/s")")));
  CHECK(dot == emit_dot(color_by_stat(annotated(spec, a), ColorMetric::Rd)));

  auto ascii = emit_dot(styled, SentinelStyle::Ascii);
  CHECK(ascii.find("label=\"START\"") != std::string::npos);
  CHECK(ascii.find("label=\"END\"") != std::string::npos);

  CHECK(emit_dot(StyledDfg{}) == "digraph {}\n");

  auto partition = color_by_partition(annotated(spec, log), build_dfg(build_activity_log(spec, a)),
                                      build_dfg(build_activity_log(spec, by_cid(log, "b"))));
  auto pdot = emit_dot(partition);
  std::regex fill(R"re(fillcolor="([^"]+)")re");
  for (auto it = std::sregex_iterator(pdot.begin(), pdot.end(), fill); it != std::sregex_iterator(); ++it) {
    const auto c = (*it)[1].str();
    CHECK((c == palette::kGreen || c == palette::kRed || c == palette::kWhite));
  }
}

TEST_CASE("node labels") {
  NodeStats s;
  s.rd = 0.123456;
  s.bytes = 2048;
  s.max_concurrency = 3;
  s.data_rate_mean = 1.5 * 1024 * 1024;
  CHECK(load_label(s) == "Load: 12.35% (2048)");
  CHECK(dr_label(s) == "DR: 3 x 1.50 MiB/s");
  s.data_rate_mean.reset();
  CHECK(dr_label(s) == "DR: 3 x n/a");
}

TEST_CASE("styled JSON") {
  auto log = testing::ls_log();
  auto styled = color_by_stat(annotated(MappingSpec{}, log), ColorMetric::Rd);
  auto doc = nlohmann::json::parse(emit_json(styled));
  CHECK(doc["nodes"].size() == styled.dfg.nodes().size());
  for (const auto& n : doc["nodes"]) CHECK(n.contains("fill"));
  for (const auto& e : doc["edges"]) CHECK(e.contains("color"));
  CHECK(doc.contains("legend"));
}
