#include "stdfg/dfg.hpp"

#include <json.hpp>

#include "stdfg/dfg_json.hpp"

namespace stdfg {

void Dfg::add_edge(const Activity& from, const Activity& to, std::uint64_t count) {
  if (count == 0) return;
  nodes_.insert(from);
  nodes_.insert(to);
  edges_[{from, to}] += count;
}

std::uint64_t Dfg::count(const Edge& e) const {
  auto it = edges_.find(e);
  return it == edges_.end() ? 0 : it->second;
}

std::uint64_t Dfg::total_count() const {
  std::uint64_t n = 0;
  for (const auto& [_, c] : edges_) n += c;
  return n;
}

const NodeStats* Dfg::stats_for(const Activity& a) const {
  auto it = stats_.find(a);
  return it == stats_.end() ? nullptr : &it->second;
}

Dfg build_dfg(const ActivityLog& log) {
  Dfg out(log.provenance());
  for (const auto& [trace, multiplicity] : log.traces()) {
    for (const auto& a : trace) out.add_node(a);
    for (std::size_t i = 1; i < trace.size(); ++i) out.add_edge(trace[i - 1], trace[i], multiplicity);
  }
  return out;
}

Dfg merge_dfg(const Dfg& a, const Dfg& b) {
  Dfg out(Provenance::combine(a.provenance(), b.provenance()));
  for (const auto* g : {&a, &b}) {
    for (const auto& n : g->nodes()) out.add_node(n);
    for (const auto& [e, c] : g->edges()) out.add_edge(e.first, e.second, c);
  }
  return out;
}

ExclusiveElements exclusive_elements(const Dfg& green, const Dfg& red) {
  ExclusiveElements out;
  for (const auto& n : green.nodes())
    if (!red.contains(n)) out.green_nodes.insert(n);
  for (const auto& n : red.nodes())
    if (!green.contains(n)) out.red_nodes.insert(n);
  for (const auto& [e, _] : green.edges())
    if (!red.contains(e)) out.green_edges.insert(e);
  for (const auto& [e, _] : red.edges())
    if (!green.contains(e)) out.red_edges.insert(e);
  return out;
}

std::string to_json(const Dfg& dfg, SentinelStyle style, int indent) {
  return detail::dfg_document(dfg, style).dump(indent) + "\n";
}

}  // namespace stdfg

namespace stdfg::detail {

nlohmann::ordered_json node_document(const Dfg& dfg, const Activity& a, SentinelStyle style) {
  nlohmann::ordered_json node{{"activity", a.display(style)}};
  if (a.kind == Activity::Kind::Start) node["sentinel"] = "start";
  if (a.kind == Activity::Kind::End) node["sentinel"] = "end";
  if (const auto* s = dfg.stats_for(a)) {
    node["load"] = {{"rd", s->rd}, {"total_dur_us", s->total_dur_us}, {"bytes", s->bytes}};
    node["dr"] = {{"max_concurrency", s->max_concurrency},
                  {"data_rate_mean", s->data_rate_mean ? nlohmann::ordered_json(*s->data_rate_mean)
                                                       : nlohmann::ordered_json(nullptr)}};
    node["sample_count"] = s->sample_count;
  }
  return node;
}

nlohmann::ordered_json dfg_document(const Dfg& dfg, SentinelStyle style) {
  nlohmann::ordered_json doc;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : dfg.nodes()) doc["nodes"].push_back(node_document(dfg, n, style));
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& [e, c] : dfg.edges())
    doc["edges"].push_back({{"src", e.first.display(style)}, {"dst", e.second.display(style)}, {"count", c}});
  doc["provenance"] = {{"mapping", dfg.provenance().mapping}, {"cases", dfg.provenance().cases}};
  return doc;
}

}  // namespace stdfg::detail
