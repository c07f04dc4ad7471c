#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "farmledger/cid.hpp"
#include "farmledger/peer.hpp"
#include "farmledger/simtime.hpp"

namespace farmledger {

inline constexpr std::size_t kBucketSize = 20;   // k
inline constexpr std::size_t kLookupAlpha = 3;   // α
inline constexpr std::size_t kKeyBits = 256;
inline constexpr std::size_t kServerThreshold = 4;
inline constexpr SimDuration kDefaultProviderTtl = std::chrono::hours(24);

using DhtKey = std::array<std::uint8_t, 32>;
using Distance = std::array<std::uint8_t, 32>;

DhtKey dht_key(const Cid& cid);
DhtKey dht_key(const PeerId& peer);

/// Bitwise xor; big-endian so lexicographic order is numeric order.
Distance xor_distance(const DhtKey& a, const DhtKey& b);

/// Number of leading bits shared by a and b (256 when equal).
std::size_t common_prefix_length(const DhtKey& a, const DhtKey& b);

struct PeerEntry {
  PeerId id;
  Multiaddress addr;
  SimTime last_seen{0};
  bool server = false;  // last role the peer reported
};

class RoutingTable {
 public:
  explicit RoutingTable(PeerId owner);

  const PeerId& owner() const { return owner_; }

  /// Inserts or refreshes. A full bucket drops its least recently seen entry.
  /// The owner is never inserted.
  void upsert(const PeerEntry& entry);
  void remove(const PeerId& peer);
  bool contains(const PeerId& peer) const;
  std::optional<PeerEntry> find(const PeerId& peer) const;
  std::size_t size() const;

  std::size_t bucket_index(const PeerId& peer) const;
  const std::vector<PeerEntry>& bucket(std::size_t index) const { return buckets_.at(index); }
  std::size_t bucket_count() const { return buckets_.size(); }

  std::vector<PeerEntry> entries() const;

 private:
  PeerId owner_;
  DhtKey owner_key_;
  std::vector<std::vector<PeerEntry>> buckets_;
};

/// The n entries closest to key, ascending by distance, ties by PeerId bytes.
std::vector<PeerEntry> closest_peers(const RoutingTable& table, const DhtKey& key, std::size_t n);

/// Sorts in place by (distance to key, raw peer id).
void sort_by_distance(std::vector<PeerEntry>& peers, const DhtKey& key);

struct ProviderRecord {
  Cid cid;
  PeerId provider;
  Multiaddress addr;
  SimTime published_at{0};
  SimDuration ttl = kDefaultProviderTtl;

  bool expired(SimTime now) const { return now > published_at + ttl; }
};

class ProviderStore {
 public:
  /// Replaces an existing record for the same (cid, provider).
  void add(const ProviderRecord& record);
  std::vector<ProviderRecord> find(const Cid& cid, SimTime now) const;
  std::size_t purge_expired(SimTime now);
  std::size_t size() const;

 private:
  std::map<Cid, std::map<PeerId, ProviderRecord>> records_;
};

enum class DhtRoleKind { Client, Server };

/// Client until four distinct peers have dialled in; the upgrade never reverts.
class DhtRole {
 public:
  DhtRoleKind kind() const { return kind_; }
  bool is_server() const { return kind_ == DhtRoleKind::Server; }

  DhtRoleKind record_inbound(const PeerId& from);
  std::size_t inbound_count() const { return inbound_.size(); }
  const std::set<PeerId>& inbound_peers() const { return inbound_; }

  /// Test fixture hook.
  void force_server() { kind_ = DhtRoleKind::Server; }

 private:
  DhtRoleKind kind_ = DhtRoleKind::Client;
  std::set<PeerId> inbound_;
};

struct LookupReply {
  bool server = false;
  std::vector<PeerEntry> closer;
  std::vector<ProviderRecord> providers;
};

struct LookupResult {
  /// Every peer that answered, ascending by distance to the key.
  std::vector<PeerEntry> responders;
  std::vector<ProviderRecord> providers;
  std::size_t rounds = 0;
  std::size_t queried = 0;
};

/// Sends one batch of queries and returns one reply slot per peer (empty on
/// timeout).
using LookupQuery = std::function<std::vector<std::optional<LookupReply>>(const std::vector<PeerEntry>&)>;

/// Iterative Kademlia lookup. Queries the α closest unqueried peers per round
/// until a round learns nothing closer, then sweeps the k closest known peers
/// that have not been asked yet.
LookupResult iterative_lookup(const PeerId& self, const DhtKey& key, std::vector<PeerEntry> seeds,
                              const LookupQuery& query);

}  // namespace farmledger
