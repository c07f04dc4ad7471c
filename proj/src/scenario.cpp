#include "farmledger/scenario.hpp"

#include <algorithm>

#include "farmledger/encoding.hpp"
#include "farmledger/simnet.hpp"

namespace farmledger {

SimRunResult run_sim_scenario(const SimRunOptions& options) {
  if (options.nodes < 2) throw Error(ErrorCode::InvalidArgument, "a run needs at least two nodes");
  if (!(options.duration_hours >= 0)) throw Error(ErrorCode::InvalidArgument, "duration must not be negative");

  SimConfig config;
  config.node_count = options.nodes;
  config.seed = options.seed;
  Simulation sim(config);
  sim.advance(std::chrono::seconds(1));

  Xoshiro256 rng(options.seed ^ 0x7061796c6f6164ULL);
  Bytes payload(options.payload_bytes);
  for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next() >> 56);

  const std::size_t publisher = options.nodes - 1;
  auto& source = sim.node(publisher);
  const auto cid = source.add(payload);
  sim.advance(std::chrono::seconds(1));

  const auto count = std::min(options.retrievers, options.nodes - 1);
  std::size_t retrieved = 0;
  nlohmann::json retrievals = nlohmann::json::array();
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t index = r * (options.nodes - 1) / std::max<std::size_t>(count, 1);
    auto& node = sim.node(index);
    bool ok = false;
    try {
      ok = node.cat(cid) == payload;
    } catch (const Error&) {
    }
    retrieved += ok ? 1 : 0;
    retrievals.push_back({{"node", index}, {"ok", ok}});
    sim.advance(std::chrono::seconds(1));
  }

  const auto hours = std::chrono::duration_cast<SimDuration>(std::chrono::duration<double, std::ratio<3600>>(options.duration_hours));
  sim.advance(hours);

  auto providers = sim.node(0).find_providers(cid);
  std::vector<std::string> provider_ids;
  for (const auto& p : providers) provider_ids.push_back(p.provider.text());
  std::sort(provider_ids.begin(), provider_ids.end());

  std::size_t servers = 0;
  for (std::size_t i = 0; i < sim.size(); ++i) servers += sim.node(i).role().is_server() ? 1 : 0;

  const auto report = sim.bandwidth_report(SimTime{0}, sim.now());
  const auto sent = sim.total_bytes_sent();
  const auto received = sim.total_bytes_received();

  SimRunResult result;
  result.summary = {
      {"nodes", options.nodes},
      {"seed", options.seed},
      {"duration_hours", options.duration_hours},
      {"payload_bytes", options.payload_bytes},
      {"cid", cid.text()},
      {"publisher", publisher},
      {"retrievals", retrievals},
      {"retrieved", retrieved},
      {"providers_final", provider_ids},
      {"servers", servers},
      {"events", sim.events_processed()},
      {"sim_time_ms", sim.now().count()},
      {"bytes_total", sent},
      {"bytes_sent", sent},
      {"bytes_received", received},
      {"conserved", sent == received},
      {"trace_hash", hex_encode(sim.trace_hash())},
  };
  result.bandwidth_csv = bandwidth_csv(report);
  return result;
}

}  // namespace farmledger
