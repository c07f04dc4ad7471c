#pragma once

#include <string>

#include <json.hpp>

namespace farmledger::analytics {

/// Static SVG for an analyze result: a line chart for timeseries, points with
/// per-group trend lines and a legend for scatter.
std::string render_svg(const nlohmann::json& chart, int width = 800, int height = 480);

}  // namespace farmledger::analytics
