#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "farmledger/guard.hpp"

namespace farmledger {

class Node;

struct GatewayConfig {
  /// Wall-clock budget for one resolve before answering 404.
  std::chrono::milliseconds resolve_timeout{5000};
  std::chrono::milliseconds poll_interval{250};
  /// Simulated time each network attempt may spend.
  std::chrono::milliseconds attempt_deadline{1000};
};

struct GatewayResponse {
  int status = 200;
  std::string media_type;
  std::string body;
  std::string cid;  // set when resolved
};

/// Maps /ipfs/<cid> onto the backing node's cat. Fetched blocks stay in the
/// node's store unpinned.
class Gateway {
 public:
  Gateway(Node& node, SimGuard& guard, GatewayConfig config = {});

  GatewayResponse resolve(std::string_view path);
  const GatewayConfig& config() const { return config_; }

 private:
  Node& node_;
  SimGuard& guard_;
  GatewayConfig config_;
};

/// application/json when the bytes parse as JSON, else application/octet-stream.
std::string sniff_media_type(std::string_view body);

}  // namespace farmledger
