#pragma once

// Shared by dfg.cpp and render.cpp; not part of the public surface.

#include <json.hpp>

#include "stdfg/dfg.hpp"

namespace stdfg::detail {

nlohmann::ordered_json node_document(const Dfg& dfg, const Activity& a, SentinelStyle style);
nlohmann::ordered_json dfg_document(const Dfg& dfg, SentinelStyle style);

}  // namespace stdfg::detail
