#include "farmledger/report.hpp"

namespace farmledger::analytics {

using nlohmann::json;

std::optional<Chart> parse_chart(std::string_view s) {
  if (s == "timeseries") return Chart::TimeSeries;
  if (s == "scatter") return Chart::Scatter;
  return std::nullopt;
}

std::string_view chart_name(Chart c) { return c == Chart::Scatter ? "scatter" : "timeseries"; }

namespace {

template <class T>
T required(std::optional<T> v, const std::string& key, const std::string& value) {
  if (!v) throw Error(ErrorCode::InvalidArgument, "bad value for " + key + ": " + value);
  return *v;
}

}  // namespace

AnalyzeRequest parse_analyze_params(const std::map<std::string, std::string>& params) {
  AnalyzeRequest req;
  std::optional<Date> from, to;
  for (const auto& [key, value] : params) {
    if (key == "chart") {
      req.chart = required(parse_chart(value), key, value);
    } else if (key == "bucket") {
      req.bucket = required(parse_bucket(value), key, value);
    } else if (key == "resource") {
      req.resource = required(parse_resource(value), key, value);
    } else if (key == "group_by") {
      req.group_by = required(parse_group_by(value), key, value);
    } else if (key == "product_type") {
      req.filter.product_type = value;
    } else if (key == "location") {
      req.filter.location = value;
    } else if (key == "farm_type") {
      req.filter.farm_type = required(farm::parse_farm_type(value), key, value);
    } else if (key == "from") {
      from = required(farm::parse_date(value), key, value);
    } else if (key == "to") {
      to = required(farm::parse_date(value), key, value);
    }
  }
  if (from || to) {
    req.filter.date_range = std::make_pair(from.value_or(Date{std::chrono::year{0}, std::chrono::January, std::chrono::day{1}}),
                                           to.value_or(Date{std::chrono::year{9999}, std::chrono::December, std::chrono::day{31}}));
  }
  return req;
}

std::map<std::string, std::string> analyze_params(const AnalyzeRequest& request) {
  std::map<std::string, std::string> out;
  out["chart"] = chart_name(request.chart);
  if (request.chart == Chart::TimeSeries) {
    out["bucket"] = bucket_name(request.bucket);
  } else {
    out["resource"] = resource_name(request.resource);
    out["group_by"] = group_by_name(request.group_by);
  }
  const auto& f = request.filter;
  if (f.product_type) out["product_type"] = *f.product_type;
  if (f.location) out["location"] = *f.location;
  if (f.farm_type) out["farm_type"] = farm::farm_type_name(*f.farm_type);
  if (f.date_range) {
    out["from"] = farm::format_date(f.date_range->first);
    out["to"] = farm::format_date(f.date_range->second);
  }
  return out;
}

json series_json(const Series& s) {
  json points = json::array();
  for (const auto& p : s.points) points.push_back({{"bucket_start", farm::format_date(p.bucket_start)}, {"value", p.value}});
  return points;
}

json scatter_json(const GroupedScatter& g) {
  json groups = json::array();
  for (const auto& [label, group] : g.groups) {
    json points = json::array();
    for (const auto& p : group.points) points.push_back({{"x", p.x}, {"y", p.y}});
    json fit = nullptr;
    if (group.fit) fit = {{"slope", group.fit->slope}, {"intercept", group.fit->intercept}, {"r2", group.fit->r2}};
    groups.push_back({{"label", label}, {"points", std::move(points)}, {"fit", std::move(fit)}});
  }
  return groups;
}

json totals_json(const Totals& t) {
  return {{"yield_kg", t.yield_kg},
          {"water_l", t.water_l},
          {"electricity_kwh", t.electricity_kwh},
          {"fertilizer_kg", t.fertilizer_kg},
          {"record_count", t.record_count}};
}

json analyze_json(const Dataset& ds, const AnalyzeRequest& request) {
  json out;
  out["chart"] = chart_name(request.chart);
  if (request.chart == Chart::TimeSeries) {
    out["bucket"] = bucket_name(request.bucket);
    out["series"] = series_json(yield_over_time(ds, request.filter, request.bucket));
  } else {
    out["resource"] = resource_name(request.resource);
    out["group_by"] = group_by_name(request.group_by);
    out["groups"] = scatter_json(yield_vs_resource(ds, request.filter, request.resource, request.group_by));
  }
  out["summary"] = totals_json(summary(ds, request.filter));
  return out;
}

}  // namespace farmledger::analytics
