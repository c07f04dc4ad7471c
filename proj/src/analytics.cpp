#include "farmledger/analytics.hpp"

#include <algorithm>

namespace farmledger::analytics {

using std::chrono::days;
using std::chrono::sys_days;

bool Filter::matches(const FarmRecord& r) const {
  if (product_type && r.product_type != *product_type) return false;
  if (location && r.location != *location) return false;
  if (farm_type && r.farm_type != *farm_type) return false;
  if (date_range && (r.date < date_range->first || r.date > date_range->second)) return false;
  return true;
}

std::optional<Bucket> parse_bucket(std::string_view s) {
  if (s == "day") return Bucket::Day;
  if (s == "month") return Bucket::Month;
  if (s == "year") return Bucket::Year;
  return std::nullopt;
}

std::optional<Resource> parse_resource(std::string_view s) {
  if (s == "water_l") return Resource::WaterL;
  if (s == "electricity_kwh") return Resource::ElectricityKwh;
  if (s == "fertilizer_kg") return Resource::FertilizerKg;
  return std::nullopt;
}

std::optional<GroupBy> parse_group_by(std::string_view s) {
  if (s == "farm_type") return GroupBy::FarmType;
  if (s == "product_type") return GroupBy::ProductType;
  if (s == "location") return GroupBy::Location;
  return std::nullopt;
}

std::string_view bucket_name(Bucket b) {
  switch (b) {
    case Bucket::Day: return "day";
    case Bucket::Month: return "month";
    case Bucket::Year: return "year";
  }
  return "";
}

std::string_view resource_name(Resource r) {
  switch (r) {
    case Resource::WaterL: return "water_l";
    case Resource::ElectricityKwh: return "electricity_kwh";
    case Resource::FertilizerKg: return "fertilizer_kg";
  }
  return "";
}

std::string_view group_by_name(GroupBy g) {
  switch (g) {
    case GroupBy::FarmType: return "farm_type";
    case GroupBy::ProductType: return "product_type";
    case GroupBy::Location: return "location";
  }
  return "";
}

double resource_value(const FarmRecord& r, Resource resource) {
  switch (resource) {
    case Resource::WaterL: return r.water_l;
    case Resource::ElectricityKwh: return r.electricity_kwh;
    case Resource::FertilizerKg: return r.fertilizer_kg;
  }
  return 0;
}

std::string group_label(const FarmRecord& r, GroupBy group_by) {
  switch (group_by) {
    case GroupBy::FarmType: return std::string(farm::farm_type_name(r.farm_type));
    case GroupBy::ProductType: return r.product_type;
    case GroupBy::Location: return r.location;
  }
  return {};
}

Date bucket_start(const Date& d, Bucket bucket) {
  switch (bucket) {
    case Bucket::Day: return d;
    case Bucket::Month: return d.year() / d.month() / 1;
    case Bucket::Year: return d.year() / std::chrono::January / 1;
  }
  return d;
}

namespace {

Date next_bucket(const Date& d, Bucket bucket) {
  switch (bucket) {
    case Bucket::Day: return Date{sys_days{d} + days{1}};
    case Bucket::Month: return d + std::chrono::months{1};
    case Bucket::Year: return d + std::chrono::years{1};
  }
  return d;
}

double mean(std::span<const double> v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

}  // namespace

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Dataset apply_filter(const Dataset& ds, const Filter& f) {
  Dataset out;
  std::copy_if(ds.records.begin(), ds.records.end(), std::back_inserter(out.records),
               [&](const FarmRecord& r) { return f.matches(r); });
  return out;
}

Series yield_over_time(const Dataset& ds, const Filter& f, Bucket bucket) {
  std::map<Date, std::vector<double>> sums;
  for (const auto& r : ds.records) {
    if (f.matches(r)) sums[bucket_start(r.date, bucket)].push_back(r.yield_kg);
  }
  Series series;
  if (sums.empty()) return series;
  const Date last = sums.rbegin()->first;
  for (Date d = sums.begin()->first; d <= last; d = next_bucket(d, bucket)) {
    auto it = sums.find(d);
    series.points.push_back({d, it == sums.end() ? 0.0 : pairwise_sum(it->second)});
  }
  return series;
}

GroupedScatter yield_vs_resource(const Dataset& ds, const Filter& f, Resource resource, GroupBy group_by) {
  GroupedScatter out;
  out.resource = resource;
  out.group_by = group_by;
  for (const auto& r : ds.records) {
    if (f.matches(r)) out.groups[group_label(r, group_by)].points.push_back({resource_value(r, resource), r.yield_kg});
  }
  for (auto& [label, group] : out.groups) group.fit = linear_fit(group.points);
  return out;
}

std::optional<LinearFit> linear_fit(std::span<const Point> points) {
  if (points.size() < 2) return std::nullopt;
  const bool distinct =
      std::any_of(points.begin(), points.end(), [&](const Point& p) { return p.x != points.front().x; });
  if (!distinct) return std::nullopt;

  const auto n = points.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
  }
  const double x_bar = mean(xs);
  const double y_bar = mean(ys);

  std::vector<double> sxy(n), sxx(n), syy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - x_bar;
    const double dy = ys[i] - y_bar;
    sxy[i] = dx * dy;
    sxx[i] = dx * dx;
    syy[i] = dy * dy;
  }
  LinearFit fit;
  fit.slope = pairwise_sum(sxy) / pairwise_sum(sxx);
  fit.intercept = y_bar - fit.slope * x_bar;

  std::vector<double> res(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    res[i] = e * e;
  }
  const double ss_res = pairwise_sum(res);
  const double ss_tot = pairwise_sum(syy);
  if (ss_tot == 0) {
    fit.r2 = 1;
  } else {
    fit.r2 = std::clamp(1 - ss_res / ss_tot, 0.0, 1.0);
  }
  return fit;
}

Totals summary(const Dataset& ds, const Filter& f) {
  std::vector<double> y, w, e, fz;
  for (const auto& r : ds.records) {
    if (!f.matches(r)) continue;
    y.push_back(r.yield_kg);
    w.push_back(r.water_l);
    e.push_back(r.electricity_kwh);
    fz.push_back(r.fertilizer_kg);
  }
  return Totals{pairwise_sum(y), pairwise_sum(w), pairwise_sum(e), pairwise_sum(fz), y.size()};
}

}  // namespace farmledger::analytics
