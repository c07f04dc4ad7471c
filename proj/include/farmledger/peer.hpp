#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "farmledger/multihash.hpp"

namespace farmledger {

struct PeerTag {};

/// Peer identifier: multihash of the sha256 of the peer's identity seed.
using PeerId = Multihash<PeerTag>;

using IdentitySeed = std::array<std::uint8_t, 32>;

PeerId generate_peer(const IdentitySeed& seed);

inline PeerId parse_peer_id(std::string_view text) { return PeerId::parse(text); }

using Ipv4 = std::array<std::uint8_t, 4>;

/// /ip4/<ip>/tcp/<port>/p2p/<peer id>
struct Multiaddress {
  Ipv4 ip{};
  std::uint16_t port = 0;
  PeerId peer;

  bool operator==(const Multiaddress&) const = default;
};

std::string render_multiaddr(const Multiaddress& m);
/// Throws Error(MalformedMultiaddr).
Multiaddress parse_multiaddr(std::string_view text);

std::string render_ipv4(const Ipv4& ip);
/// Strict dotted quad; throws Error(MalformedMultiaddr).
Ipv4 parse_ipv4(std::string_view text);

}  // namespace farmledger
