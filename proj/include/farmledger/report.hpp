#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "farmledger/analytics.hpp"

namespace farmledger::analytics {

enum class Chart { TimeSeries, Scatter };

std::optional<Chart> parse_chart(std::string_view s);
std::string_view chart_name(Chart c);

struct AnalyzeRequest {
  Chart chart = Chart::TimeSeries;
  Bucket bucket = Bucket::Month;
  Resource resource = Resource::WaterL;
  GroupBy group_by = GroupBy::ProductType;
  Filter filter;
};

/// Keys: chart, bucket, resource, group_by, product_type, location,
/// farm_type, from, to. Unknown keys are ignored. Errors: InvalidArgument.
AnalyzeRequest parse_analyze_params(const std::map<std::string, std::string>& params);
std::map<std::string, std::string> analyze_params(const AnalyzeRequest& request);

nlohmann::json series_json(const Series& s);
nlohmann::json scatter_json(const GroupedScatter& g);
nlohmann::json totals_json(const Totals& t);

/// {"chart":..., "series"|"groups":..., "summary":...}
nlohmann::json analyze_json(const Dataset& ds, const AnalyzeRequest& request);

}  // namespace farmledger::analytics
