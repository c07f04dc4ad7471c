#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "farmledger/farm.hpp"

namespace farmledger::analytics {

using farm::Dataset;
using farm::Date;
using farm::FarmRecord;
using farm::FarmType;

/// Absent fields do not constrain.
struct Filter {
  std::optional<std::string> product_type;
  std::optional<std::string> location;
  std::optional<FarmType> farm_type;
  std::optional<std::pair<Date, Date>> date_range;  // inclusive

  bool matches(const FarmRecord& r) const;
};

enum class Bucket { Day, Month, Year };
enum class Resource { WaterL, ElectricityKwh, FertilizerKg };
enum class GroupBy { FarmType, ProductType, Location };

std::optional<Bucket> parse_bucket(std::string_view s);
std::optional<Resource> parse_resource(std::string_view s);
std::optional<GroupBy> parse_group_by(std::string_view s);
std::string_view bucket_name(Bucket b);
std::string_view resource_name(Resource r);
std::string_view group_by_name(GroupBy g);

double resource_value(const FarmRecord& r, Resource resource);
std::string group_label(const FarmRecord& r, GroupBy group_by);
Date bucket_start(const Date& d, Bucket bucket);

struct SeriesPoint {
  Date bucket_start;
  double value = 0;
};

struct Series {
  std::vector<SeriesPoint> points;
};

struct Point {
  double x = 0;
  double y = 0;
};

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

struct ScatterGroup {
  std::vector<Point> points;
  std::optional<LinearFit> fit;
};

struct GroupedScatter {
  Resource resource = Resource::WaterL;
  GroupBy group_by = GroupBy::ProductType;
  std::map<std::string, ScatterGroup> groups;
};

struct Totals {
  double yield_kg = 0;
  double water_l = 0;
  double electricity_kwh = 0;
  double fertilizer_kg = 0;
  std::size_t record_count = 0;
};

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

Dataset apply_filter(const Dataset& ds, const Filter& f);

/// Summed yield per calendar bucket; every bucket between the first and last
/// filtered record is present, zero-filled.
Series yield_over_time(const Dataset& ds, const Filter& f, Bucket bucket);

GroupedScatter yield_vs_resource(const Dataset& ds, const Filter& f, Resource resource, GroupBy group_by);

/// Ordinary least squares. Empty with fewer than two distinct x values.
std::optional<LinearFit> linear_fit(std::span<const Point> points);

Totals summary(const Dataset& ds, const Filter& f);

}  // namespace farmledger::analytics
