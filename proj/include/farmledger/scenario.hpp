#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace farmledger {

struct SimRunOptions {
  std::size_t nodes = 20;
  std::uint64_t seed = 42;
  double duration_hours = 24;
  std::size_t payload_bytes = 1 << 20;
  std::size_t retrievers = 3;
};

struct SimRunResult {
  nlohmann::json summary;
  std::string bandwidth_csv;
};

/// The last node publishes a seeded random payload, evenly spaced retrievers
/// fetch it, then the network runs for the requested duration with GC and
/// republishing. Identical options give identical results.
SimRunResult run_sim_scenario(const SimRunOptions& options);

}  // namespace farmledger
