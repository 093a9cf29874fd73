#include "stdfg/render.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "stdfg/dfg_json.hpp"
#include "stdfg/error.hpp"

namespace stdfg {
namespace {

constexpr double kMiB = 1024.0 * 1024.0;

std::string dot_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string node_label(const Dfg& dfg, const Activity& a, SentinelStyle style) {
  std::string label = dot_escape(a.display(style));
  if (const auto* s = dfg.stats_for(a)) label += "\\n" + load_label(*s) + "\\n" + dr_label(*s);
  return label;
}

}  // namespace

ColorMetric parse_color_metric(std::string_view name) {
  if (name == "rd") return ColorMetric::Rd;
  if (name == "bytes") return ColorMetric::Bytes;
  throw UsageError(fmt::format("unknown color metric '{}' (expected rd or bytes)", name));
}

std::string load_label(const NodeStats& s) {
  return fmt::format("Load: {:.2f}% ({})", s.rd * 100.0, s.bytes);
}

std::string dr_label(const NodeStats& s) {
  if (!s.data_rate_mean) return fmt::format("DR: {} x n/a", s.max_concurrency);
  return fmt::format("DR: {} x {:.2f} MiB/s", s.max_concurrency, *s.data_rate_mean / kMiB);
}

std::vector<int> ramp_steps(const std::vector<double>& values) {
  const auto n = values.size();
  std::vector<int> steps(n, 2);
  if (n < 2) return steps;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t less = 0, equal = 0;
    for (double v : values) {
      if (v < values[i]) ++less;
      if (v == values[i]) ++equal;
    }
    const double rank = (static_cast<double>(less) + static_cast<double>(equal - 1) / 2.0) /
                        static_cast<double>(n - 1);
    steps[i] = static_cast<int>(std::lround(rank * 4.0));
  }
  return steps;
}

StyledDfg color_by_stat(const Dfg& dfg, ColorMetric metric) {
  StyledDfg out{dfg, {}, {}, {}};
  std::vector<Activity> regular;
  std::vector<double> values;
  for (const auto& n : dfg.nodes()) {
    if (n.is_sentinel()) {
      out.node_fill[n] = std::string(palette::kGray);
      continue;
    }
    const auto* s = dfg.stats_for(n);
    if (!s) throw MissingStats(fmt::format("node '{}' has no statistics", n.label));
    regular.push_back(n);
    values.push_back(metric == ColorMetric::Rd ? s->rd : static_cast<double>(s->bytes));
  }
  const auto steps = ramp_steps(values);
  for (std::size_t i = 0; i < regular.size(); ++i)
    out.node_fill[regular[i]] = std::string(palette::kRamp[steps[i]]);
  for (const auto& [e, _] : dfg.edges()) out.edge_color[e] = std::string(palette::kEdge);
  out.legend = metric == ColorMetric::Rd ? "blue ramp by relative duration rank (darker = higher)"
                                         : "blue ramp by total bytes rank (darker = higher)";
  return out;
}

StyledDfg color_by_partition(const Dfg& full, const Dfg& green, const Dfg& red) {
  const auto& mapping = full.provenance().mapping;
  for (const auto* g : {&green, &red}) {
    if (!g->provenance().mapping.empty() && g->provenance().mapping != mapping)
      throw SpecMismatch("partition graphs were built with a different mapping spec");
  }
  for (const auto& c : green.provenance().cases) {
    if (red.provenance().cases.contains(c))
      throw NotAPartition(fmt::format("case {} is in both the green and red subsets", c));
  }
  for (const auto* g : {&green, &red}) {
    for (const auto& c : g->provenance().cases)
      if (!full.provenance().cases.contains(c))
        throw NotAPartition(fmt::format("case {} is not part of the full event log", c));
  }

  const auto exclusive = exclusive_elements(green, red);
  StyledDfg out{full, {}, {}, {}};
  for (const auto& n : full.nodes()) {
    if (exclusive.green_nodes.contains(n))
      out.node_fill[n] = std::string(palette::kGreen);
    else if (exclusive.red_nodes.contains(n))
      out.node_fill[n] = std::string(palette::kRed);
    else
      out.node_fill[n] = std::string(palette::kWhite);
  }
  for (const auto& [e, _] : full.edges()) {
    if (exclusive.green_edges.contains(e))
      out.edge_color[e] = std::string(palette::kGreen);
    else if (exclusive.red_edges.contains(e))
      out.edge_color[e] = std::string(palette::kRed);
    else
      out.edge_color[e] = std::string(palette::kEdge);
  }
  out.legend = "green: only in green subset; red: only in red subset; uncolored: both";
  return out;
}

std::string emit_dot(const StyledDfg& styled, SentinelStyle style) {
  const auto& dfg = styled.dfg;
  if (dfg.empty()) return "digraph {}\n";

  std::map<Activity, std::size_t> ids;
  std::string out = "digraph dfg {\n";
  out += "  node [shape=box, style=\"rounded,filled\", fontname=\"Helvetica\"];\n";
  out += "  edge [fontname=\"Helvetica\"];\n";
  for (const auto& n : dfg.nodes()) {
    const auto id = ids.size();
    ids.emplace(n, id);
    auto fill = styled.node_fill.find(n);
    out += fmt::format("  n{} [label=\"{}\"{}, fillcolor=\"{}\"];\n", id, node_label(dfg, n, style),
                       n.is_sentinel() ? ", shape=circle" : "",
                       fill == styled.node_fill.end() ? std::string(palette::kWhite) : fill->second);
  }
  for (const auto& [e, count] : dfg.edges()) {
    auto color = styled.edge_color.find(e);
    out += fmt::format("  n{} -> n{} [label=\"{}\", color=\"{}\"];\n", ids.at(e.first), ids.at(e.second),
                       count,
                       color == styled.edge_color.end() ? std::string(palette::kEdge) : color->second);
  }
  out += "}\n";
  return out;
}

std::string emit_json(const StyledDfg& styled, SentinelStyle style) {
  auto doc = detail::dfg_document(styled.dfg, style);
  std::size_t i = 0;
  for (const auto& n : styled.dfg.nodes()) {
    auto it = styled.node_fill.find(n);
    doc["nodes"][i++]["fill"] = it == styled.node_fill.end() ? std::string(palette::kWhite) : it->second;
  }
  i = 0;
  for (const auto& [e, _] : styled.dfg.edges()) {
    auto it = styled.edge_color.find(e);
    doc["edges"][i++]["color"] = it == styled.edge_color.end() ? std::string(palette::kEdge) : it->second;
  }
  doc["legend"] = styled.legend;
  return doc.dump(2) + "\n";
}

}  // namespace stdfg
