#include <doctest.h>

#include <algorithm>
#include <random>

#include <json.hpp>

#include "oracles.hpp"
#include "stdfg/dfg.hpp"
#include "stdfg/error.hpp"
#include "test_util.hpp"

using namespace stdfg;
using stdfg::testing::act;

namespace {

const Activity S = Activity::start();
const Activity E = Activity::end();

EventLog cid_log(const std::string& cid) {
  return select_cases(testing::ls_log(), [&](const CaseId& id) { return id.cid == cid; });
}

ActivityTrace tr(std::initializer_list<const char*> labels) {
  ActivityTrace t{S};
  for (auto l : labels) t.push_back(act(l));
  t.push_back(E);
  return t;
}

ActivityLog random_activity_log(std::mt19937& rng) {
  ActivityLog al;
  const int distinct = static_cast<int>(rng() % 6);
  for (int i = 0; i < distinct; ++i) {
    ActivityTrace t{S};
    const int len = static_cast<int>(rng() % 6);
    for (int k = 0; k < len; ++k) t.push_back(act(std::string(1, static_cast<char>('a' + rng() % 4))));
    t.push_back(E);
    al.add(t, 1 + rng() % 4);
  }
  return al;
}

}  // namespace

TEST_CASE("build_dfg on the ls cases") {
  auto dfg = build_dfg(build_activity_log(MappingSpec{}, cid_log("a")));
  const auto ul = act("read:/usr/lib"), pf = act("read:/proc/filesystems"), la = act("read:/etc/locale.alias"),
             wp = act("write:/dev/pts");
  CHECK(dfg.nodes() == std::set<Activity>{S, ul, pf, la, wp, E});
  const std::map<Edge, std::uint64_t> expected{{{S, ul}, 3},  {{ul, ul}, 6}, {{ul, pf}, 3}, {{pf, pf}, 3},
                                               {{pf, la}, 3}, {{la, la}, 3}, {{la, wp}, 3}, {{wp, E}, 3}};
  CHECK(dfg.edges() == expected);
}

TEST_CASE("build_dfg on the fictitious log matches pair enumeration") {
  ActivityLog al;
  al.add(tr({"a", "a", "b"}), 2);
  al.add(tr({"a", "c"}), 1);
  auto dfg = build_dfg(al);

  // Expand the multiset and count adjacent pairs one trace at a time.
  auto expected = oracle::count_pairs<Activity>({tr({"a", "a", "b"}), tr({"a", "a", "b"}), tr({"a", "c"})});
  CHECK(dfg.edges() == expected);
  CHECK(dfg.count({S, act("a")}) == 3);
  CHECK(dfg.count({act("a"), act("a")}) == 2);
  CHECK(dfg.count({act("a"), act("b")}) == 2);
  CHECK(dfg.count({act("a"), act("c")}) == 1);
  CHECK(dfg.count({act("b"), E}) == 2);
  CHECK(dfg.count({act("c"), E}) == 1);
}

TEST_CASE("build_dfg degenerate inputs") {
  CHECK(build_dfg(ActivityLog{}).empty());
  ActivityLog one;
  one.add({S, E});
  auto dfg = build_dfg(one);
  CHECK(dfg.edges() == std::map<Edge, std::uint64_t>{{{S, E}, 1}});
}

TEST_CASE("merge_dfg") {
  const MappingSpec spec;
  auto ga = build_dfg(build_activity_log(spec, cid_log("a")));
  auto gb = build_dfg(build_activity_log(spec, cid_log("b")));
  auto gx = build_dfg(build_activity_log(spec, testing::ls_log()));
  CHECK(merge_dfg(ga, gb) == gx);
  CHECK(merge_dfg(ga, gb) == merge_dfg(gb, ga));
  CHECK(merge_dfg(ga, Dfg{}) == ga);
  auto doubled = merge_dfg(ga, ga);
  for (const auto& [e, c] : ga.edges()) CHECK(doubled.count(e) == 2 * c);

  MappingSpec other;
  other.depth = 3;
  CHECK_THROWS_AS(merge_dfg(ga, build_dfg(build_activity_log(other, cid_log("b")))), SpecMismatch);
}

TEST_CASE("exclusive_elements") {
  const MappingSpec spec;
  auto ga = build_dfg(build_activity_log(spec, cid_log("a")));
  auto gb = build_dfg(build_activity_log(spec, cid_log("b")));
  auto ex = exclusive_elements(ga, gb);
  CHECK(ex.green_nodes.empty());
  CHECK(ex.green_edges == std::set<Edge>{{act("read:/etc/locale.alias"), act("write:/dev/pts")}});
  CHECK(ex.red_nodes == std::set<Activity>{act("read:/etc/nsswitch.conf"), act("read:/etc/passwd"),
                                           act("read:/etc/group")});
  CHECK_FALSE(ex.red_edges.empty());
  CHECK_FALSE(ex.red_nodes.contains(S));

  auto same = exclusive_elements(ga, ga);
  CHECK(same.green_nodes.empty());
  CHECK(same.green_edges.empty());
  CHECK(same.red_nodes.empty());
  CHECK(same.red_edges.empty());

  auto vs_empty = exclusive_elements(ga, Dfg{});
  CHECK(vs_empty.green_nodes == ga.nodes());
  CHECK(vs_empty.green_edges.size() == ga.edges().size());
}

TEST_CASE("dfg invariants on random activity logs") {
  std::mt19937 rng(5);
  for (int round = 0; round < 300; ++round) {
    auto a1 = random_activity_log(rng);
    auto a2 = random_activity_log(rng);
    auto dfg = build_dfg(a1);

    std::uint64_t expected_total = 0;
    for (const auto& [t, m] : a1.traces()) expected_total += (t.size() - 1) * m;
    CHECK(dfg.total_count() == expected_total);

    std::map<Activity, std::uint64_t> in, out;
    for (const auto& [e, c] : dfg.edges()) {
      out[e.first] += c;
      in[e.second] += c;
      CHECK(e.second != S);
      CHECK(e.first != E);
    }
    for (const auto& n : dfg.nodes())
      if (!n.is_sentinel()) CHECK(in[n] == out[n]);

    CHECK(build_dfg(a1 + a2) == merge_dfg(build_dfg(a1), build_dfg(a2)));
  }
}

TEST_CASE("dfg is insensitive to case order") {
  auto log = testing::ls_log();
  std::vector<Case> cases = log.cases();
  std::mt19937 rng(9);
  const auto reference = build_dfg(build_activity_log(MappingSpec{}, log));
  for (int i = 0; i < 10; ++i) {
    std::shuffle(cases.begin(), cases.end(), rng);
    CHECK(build_dfg(build_activity_log(MappingSpec{}, EventLog(cases))) == reference);
  }
}

TEST_CASE("dfg JSON") {
  auto dfg = build_dfg(build_activity_log(MappingSpec{}, cid_log("a")));
  auto doc = nlohmann::json::parse(to_json(dfg, SentinelStyle::Ascii));
  CHECK(doc["nodes"].size() == 6);
  CHECK(doc["nodes"][0]["activity"] == "START");
  CHECK(doc["nodes"][0]["sentinel"] == "start");
  CHECK(doc["nodes"][5]["activity"] == "END");
  CHECK(doc["edges"].size() == 8);
  CHECK(doc["edges"][0]["src"] == "START");
  CHECK(doc["edges"][0]["dst"] == "read:/usr/lib");
  CHECK(doc["edges"][0]["count"] == 3);
  CHECK(doc["edges"][7]["dst"] == "END");
  CHECK(doc["provenance"]["cases"].size() == 3);
}
