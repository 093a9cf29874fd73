#pragma once

#include <map>
#include <string>
#include <string_view>

#include "stdfg/dfg.hpp"

namespace stdfg {

namespace palette {
// Lightest to darkest.
inline constexpr std::string_view kRamp[5] = {"#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#3182bd"};
inline constexpr std::string_view kGreen = "#2ca25f";
inline constexpr std::string_view kRed = "#de2d26";
inline constexpr std::string_view kWhite = "#ffffff";
inline constexpr std::string_view kGray = "#bdbdbd";
inline constexpr std::string_view kEdge = "#000000";
}  // namespace palette

enum class ColorMetric { Rd, Bytes };

// Parses "rd" or "bytes"; throws UsageError otherwise.
ColorMetric parse_color_metric(std::string_view name);

struct StyledDfg {
  Dfg dfg;
  std::map<Activity, std::string> node_fill;
  std::map<Edge, std::string> edge_color;
  std::string legend;
};

// Ramp step in [0, 4] for each value by mid-rank: the smallest value gets 0,
// the largest 4, and ties share the step of their average rank. A lone value
// or an all-equal set lands on the middle step.
std::vector<int> ramp_steps(const std::vector<double>& values);

// Blue ramp by metric rank; sentinels gray. Throws MissingStats if a regular
// node carries no statistics.
StyledDfg color_by_stat(const Dfg& dfg, ColorMetric metric);

// Colors `full` by the elements exclusive to `green` or to `red`. Throws
// SpecMismatch for different mappings and NotAPartition when the two case
// sets overlap or are not drawn from `full`.
StyledDfg color_by_partition(const Dfg& full, const Dfg& green, const Dfg& red);

// Graphviz digraph with one statement per node and edge in graph order.
std::string emit_dot(const StyledDfg& styled, SentinelStyle style = SentinelStyle::Glyph);

// Dfg JSON plus "fill" per node, "color" per edge and a "legend".
std::string emit_json(const StyledDfg& styled, SentinelStyle style = SentinelStyle::Glyph);

// "Load: 12.34% (1024)" and "DR: 2 x 1.50 MiB/s"
std::string load_label(const NodeStats& s);
std::string dr_label(const NodeStats& s);

}  // namespace stdfg
