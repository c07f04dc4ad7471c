#pragma once

#include <random>
#include <string>

#include "farmledger/farm.hpp"

namespace testing {

/// Synthetic dataset. Quantities are multiples of 1/4 so every partial sum is exact.
inline farmledger::farm::Dataset synthetic_dataset(std::size_t rows, std::uint64_t seed) {
  using namespace farmledger::farm;
  using namespace std::chrono;
  std::mt19937_64 rng(seed);
  const char* products[] = {"lettuce", "tomato", "basil", "kale"};
  const char* locations[] = {"Dhaka", "Sylhet", "Khulna"};
  Dataset ds;
  for (std::size_t i = 0; i < rows; ++i) {
    FarmRecord r;
    r.date = year_month_day{sys_days{year{2021} / January / 1} + days{static_cast<int>(rng() % 900)}};
    r.farm_id = "F" + std::to_string(rng() % 12);
    r.location = locations[rng() % 3];
    r.farm_type = rng() % 2 ? FarmType::Vertical : FarmType::Conventional;
    r.product_type = products[rng() % 4];
    r.yield_kg = static_cast<double>(rng() % 40000) / 4;
    r.water_l = static_cast<double>(rng() % 400000) / 4;
    r.electricity_kwh = static_cast<double>(rng() % 8000) / 4;
    r.fertilizer_kg = static_cast<double>(rng() % 2000) / 4;
    ds.records.push_back(r);
  }
  return ds;
}

inline std::string to_csv(const farmledger::farm::Dataset& ds) {
  using namespace farmledger::farm;
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : ds.records) {
    out += format_date(r.date) + "," + r.farm_id + "," + r.location + "," + std::string(farm_type_name(r.farm_type)) +
           "," + r.product_type + "," + format_number(r.yield_kg) + "," + format_number(r.water_l) + "," +
           format_number(r.electricity_kwh) + "," + format_number(r.fertilizer_kg) + "\n";
  }
  return out;
}

}  // namespace testing
