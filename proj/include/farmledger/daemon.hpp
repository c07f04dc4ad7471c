#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "farmledger/gateway.hpp"
#include "farmledger/guard.hpp"
#include "farmledger/peer.hpp"

namespace httplib {
class Server;
}

namespace farmledger {

class Node;
class Simulation;
namespace pinning {
class PinningService;
}

struct DaemonConfig {
  Ipv4 api_ip{127, 0, 0, 1};
  std::uint16_t api_port = 5001;
  std::uint16_t gateway_port = 8080;
  /// 0 disables the pinning service.
  std::uint16_t pinsvc_port = 0;
  double gc_ttl_hours = 12;
  std::string visualizer_base = "http://127.0.0.1:5173";
  std::uint64_t seed = 1;
  /// Emulated peers sharing the in-process network with this node.
  std::size_t sim_peers = 7;
  std::optional<std::filesystem::path> repo;
  std::chrono::milliseconds resolve_timeout{5000};
};

/// Reads key=value lines; '#' starts a comment. Keys: listen, gateway_port,
/// pinsvc_port, gc_ttl_hours, visualizer_base, seed, sim_peers, repo,
/// resolve_timeout_ms. Errors: InvalidArgument.
DaemonConfig parse_daemon_config(std::string_view text, DaemonConfig base = {});
DaemonConfig load_daemon_config(const std::filesystem::path& path, DaemonConfig base = {});
/// Applies one key to the config. Errors: InvalidArgument.
void set_daemon_option(DaemonConfig& config, std::string_view key, std::string_view value);

/// "/ip4/<a.b.c.d>/tcp/<port>". Errors: MalformedMultiaddr.
std::pair<Ipv4, std::uint16_t> parse_listen_addr(std::string_view text);

/// Node + RPC API + gateway (+ optional pinning service) in one process.
/// Simulated time follows wall-clock time.
class Daemon {
 public:
  explicit Daemon(DaemonConfig config);
  ~Daemon();
  Daemon(const Daemon&) = delete;
  Daemon& operator=(const Daemon&) = delete;

  /// Binds every listener (port 0 picks a free port) and starts serving.
  void start();
  void stop();
  /// Blocks until another thread calls stop().
  void wait();

  std::uint16_t api_port() const { return api_port_; }
  std::uint16_t gateway_port() const { return gateway_port_; }
  std::uint16_t pinsvc_port() const { return pinsvc_port_; }

  Node& node() { return *node_; }
  Simulation& simulation() { return *sim_; }
  SimGuard& guard() { return guard_; }
  pinning::PinningService* pinning_service() { return pinsvc_.get(); }

 private:
  void tick();

  DaemonConfig config_;
  SimGuard guard_;
  std::unique_ptr<Simulation> sim_;
  Node* node_ = nullptr;
  Node* pin_node_ = nullptr;
  std::unique_ptr<Gateway> gateway_;
  std::unique_ptr<pinning::PinningService> pinsvc_;
  std::unique_ptr<httplib::Server> api_server_;
  std::unique_ptr<httplib::Server> gateway_server_;
  std::unique_ptr<httplib::Server> pinsvc_server_;
  std::vector<std::thread> threads_;
  std::atomic<bool> running_{false};
  std::chrono::steady_clock::time_point started_;
  std::uint16_t api_port_ = 0;
  std::uint16_t gateway_port_ = 0;
  std::uint16_t pinsvc_port_ = 0;
};

}  // namespace farmledger
