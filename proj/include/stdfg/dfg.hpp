#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "stdfg/mapping.hpp"

namespace stdfg {

struct NodeStats {
  double rd = 0.0;                  // share of total mapped duration
  std::int64_t total_dur_us = 0;
  std::int64_t bytes = 0;
  std::optional<double> data_rate_mean;  // bytes/s; absent without samples
  std::int64_t max_concurrency = 0;
  std::int64_t sample_count = 0;

  bool operator==(const NodeStats&) const = default;
};

using Edge = std::pair<Activity, Activity>;

// Directly-follows graph. Nodes and edges live in ordered maps, so iteration
// is START first, END last, labels lexicographic in between; edges by
// (source, target).
class Dfg {
 public:
  Dfg() = default;
  explicit Dfg(Provenance provenance) : provenance_(std::move(provenance)) {}

  void add_node(const Activity& a) { nodes_.insert(a); }
  void add_edge(const Activity& from, const Activity& to, std::uint64_t count);

  const std::set<Activity>& nodes() const { return nodes_; }
  const std::map<Edge, std::uint64_t>& edges() const { return edges_; }
  const Provenance& provenance() const { return provenance_; }
  const std::map<Activity, NodeStats>& stats() const { return stats_; }

  bool empty() const { return nodes_.empty(); }
  bool contains(const Activity& a) const { return nodes_.contains(a); }
  bool contains(const Edge& e) const { return edges_.contains(e); }
  std::uint64_t count(const Edge& e) const;
  std::uint64_t total_count() const;

  void set_stats(const Activity& a, NodeStats s) { stats_[a] = std::move(s); }
  const NodeStats* stats_for(const Activity& a) const;

  bool operator==(const Dfg&) const = default;

 private:
  Provenance provenance_;
  std::set<Activity> nodes_;
  std::map<Edge, std::uint64_t> edges_;
  std::map<Activity, NodeStats> stats_;
};

// One pass over the distinct traces; every adjacent pair adds the trace's
// multiplicity to its edge.
Dfg build_dfg(const ActivityLog& log);

// Node union and edge-count sum; the empty Dfg is the identity. Statistics are
// not carried over.
Dfg merge_dfg(const Dfg& a, const Dfg& b);

struct ExclusiveElements {
  std::set<Activity> green_nodes;
  std::set<Edge> green_edges;
  std::set<Activity> red_nodes;
  std::set<Edge> red_edges;
};

// Elements present (by key) in exactly one of the two graphs.
ExclusiveElements exclusive_elements(const Dfg& green, const Dfg& red);

// {"nodes": [...], "edges": [{src, dst, count}], "provenance": {...}}
std::string to_json(const Dfg& dfg, SentinelStyle style = SentinelStyle::Glyph, int indent = 2);

}  // namespace stdfg
