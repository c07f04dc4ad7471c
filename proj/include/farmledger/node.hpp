#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <vector>

#include "farmledger/dag.hpp"
#include "farmledger/dht.hpp"
#include "farmledger/exchange.hpp"
#include "farmledger/peer.hpp"
#include "farmledger/simtime.hpp"
#include "farmledger/wire.hpp"

namespace farmledger {

class Simulation;

inline constexpr SimDuration kDefaultGcTtl = std::chrono::hours(12);
inline constexpr SimDuration kDefaultFetchDeadline = std::chrono::seconds(30);

struct NodeConfig {
  IdentitySeed seed{};
  Ipv4 listen_ip{127, 0, 0, 1};
  std::uint16_t listen_port = 4001;
  SimDuration gc_ttl = kDefaultGcTtl;
  SimDuration provider_ttl = kDefaultProviderTtl;
  std::vector<Multiaddress> bootstrap;
  /// When set, pinned blocks and the pin list survive restarts here.
  std::optional<std::filesystem::path> repo;
};

/// Pinned roots and every block reachable from them.
class PinSet {
 public:
  bool is_root(const Cid& cid) const { return roots_.count(cid) != 0; }
  bool protects(const Cid& cid) const { return closure_.count(cid) != 0; }
  const std::set<Cid>& roots() const { return roots_; }
  const std::set<Cid>& closure() const { return closure_; }

  void add_root(const Cid& cid) { roots_.insert(cid); }
  void remove_root(const Cid& cid) { roots_.erase(cid); }
  void recompute(BlockSource& source);

 private:
  std::set<Cid> roots_;
  std::set<Cid> closure_;
};

struct FetchStats {
  bool used_dht = false;
  std::set<PeerId> contacted;  // peers that were sent a want
  std::size_t discovered_providers = 0;
};

/// A peer: block store, DHT state, block exchange, pins and GC.
///
/// All mutation happens on the simulation's single event loop.
class Node {
 public:
  Node(Simulation& sim, NodeConfig config);
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  const PeerId& id() const { return id_; }
  const Multiaddress& addr() const { return addr_; }
  const NodeConfig& config() const { return config_; }
  SimTime now() const;

  // DHT
  const DhtRole& role() const { return role_; }
  DhtRole& role() { return role_; }
  const RoutingTable& routing_table() const { return table_; }
  const ProviderStore& provider_store() const { return providers_; }
  /// Servers store and return true; clients refuse.
  bool store_provider(const ProviderRecord& record);
  /// Publishes a provider record on the k closest servers. Throws
  /// Error(NoServersReachable) when the lookup finds none.
  std::vector<PeerId> provide(const Cid& cid);
  std::vector<ProviderRecord> find_providers(const Cid& cid);
  const LookupResult& last_lookup() const { return last_lookup_; }

  // Connections
  bool connect(const PeerId& peer);
  bool is_connected(const PeerId& peer) const { return connections_.count(peer) != 0; }
  const std::set<PeerId>& connections() const { return connections_; }

  // Block exchange
  /// Errors: NotFoundAnywhere, IntegrityError.
  Block fetch_block(const Cid& cid, SimDuration deadline = kDefaultFetchDeadline);
  const BandwidthLedger& ledger() const { return ledger_; }
  BandwidthLedger& ledger() { return ledger_; }
  const std::set<PeerId>& bad_peers() const { return bad_peers_; }
  const FetchStats& last_fetch() const { return last_fetch_; }
  const WantList& want_list() const { return wants_; }

  // Content
  /// Errors: TooLarge.
  Cid add(ByteView data);
  /// Errors: NotFoundAnywhere, IntegrityError.
  Bytes cat(const Cid& cid, SimDuration deadline = kDefaultFetchDeadline);
  void pin(const Cid& cid, SimDuration deadline = kDefaultFetchDeadline);
  void unpin(const Cid& cid);
  bool is_pinned(const Cid& cid) const { return pins_.is_root(cid); }
  const PinSet& pins() const { return pins_; }
  std::vector<Cid> run_gc(SimTime now);
  void republish();
  const std::set<Cid>& provided() const { return provided_; }

  BlockStore& store() { return store_; }
  const BlockStore& store() const { return store_; }

  /// Serves one inbound message; requests return their reply.
  std::optional<Envelope> handle(const PeerId& from, const Envelope& message);
  /// Called once an outbound dial has landed.
  void on_dialed(const PeerId& peer, const Multiaddress& addr);

 private:
  std::vector<std::optional<LookupReply>> query(const std::vector<PeerEntry>& peers, MessageKind kind,
                                                const Cid& target);
  LookupResult lookup(const Cid& target, MessageKind kind);
  void refresh_peer(const PeerId& peer, std::optional<bool> server);
  void persist_pins();
  void load_repo();

  Simulation& sim_;
  NodeConfig config_;
  PeerId id_;
  Multiaddress addr_;

  BlockStore store_;
  PinSet pins_;
  RoutingTable table_;
  ProviderStore providers_;
  DhtRole role_;
  BandwidthLedger ledger_;
  WantList wants_;

  std::set<PeerId> connections_;
  std::set<PeerId> bad_peers_;
  std::set<Cid> provided_;
  LookupResult last_lookup_;
  FetchStats last_fetch_;
};

}  // namespace farmledger
