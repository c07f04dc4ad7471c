#include "farmledger/dht.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace farmledger {

DhtKey dht_key(const Cid& cid) { return sha256(cid.raw()); }
DhtKey dht_key(const PeerId& peer) { return sha256(peer.raw()); }

Distance xor_distance(const DhtKey& a, const DhtKey& b) {
  Distance d{};
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] ^ b[i];
  return d;
}

std::size_t common_prefix_length(const DhtKey& a, const DhtKey& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::uint8_t x = a[i] ^ b[i];
    if (x != 0) return i * 8 + static_cast<std::size_t>(std::countl_zero(x));
  }
  return kKeyBits;
}

void sort_by_distance(std::vector<PeerEntry>& peers, const DhtKey& key) {
  std::vector<std::pair<Distance, std::size_t>> order;
  order.reserve(peers.size());
  for (std::size_t i = 0; i < peers.size(); ++i) order.emplace_back(xor_distance(dht_key(peers[i].id), key), i);
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return peers[a.second].id.raw() < peers[b.second].id.raw();
  });
  std::vector<PeerEntry> sorted;
  sorted.reserve(peers.size());
  for (const auto& [dist, i] : order) sorted.push_back(peers[i]);
  peers = std::move(sorted);
}

RoutingTable::RoutingTable(PeerId owner) : owner_(owner), owner_key_(dht_key(owner)), buckets_(kKeyBits) {}

std::size_t RoutingTable::bucket_index(const PeerId& peer) const {
  return std::min(common_prefix_length(owner_key_, dht_key(peer)), kKeyBits - 1);
}

void RoutingTable::upsert(const PeerEntry& entry) {
  if (entry.id == owner_) return;
  auto& bucket = buckets_[bucket_index(entry.id)];
  auto it = std::find_if(bucket.begin(), bucket.end(), [&](const PeerEntry& e) { return e.id == entry.id; });
  if (it != bucket.end()) {
    it->addr = entry.addr;
    it->last_seen = std::max(it->last_seen, entry.last_seen);
    it->server = entry.server;
    return;
  }
  if (bucket.size() >= kBucketSize) {
    auto oldest = std::min_element(bucket.begin(), bucket.end(), [](const PeerEntry& a, const PeerEntry& b) {
      return a.last_seen != b.last_seen ? a.last_seen < b.last_seen : a.id < b.id;
    });
    bucket.erase(oldest);
  }
  bucket.push_back(entry);
}

void RoutingTable::remove(const PeerId& peer) {
  auto& bucket = buckets_[bucket_index(peer)];
  std::erase_if(bucket, [&](const PeerEntry& e) { return e.id == peer; });
}

bool RoutingTable::contains(const PeerId& peer) const { return find(peer).has_value(); }

std::optional<PeerEntry> RoutingTable::find(const PeerId& peer) const {
  if (peer == owner_) return std::nullopt;
  const auto& bucket = buckets_[bucket_index(peer)];
  for (const auto& e : bucket) {
    if (e.id == peer) return e;
  }
  return std::nullopt;
}

std::size_t RoutingTable::size() const {
  std::size_t n = 0;
  for (const auto& b : buckets_) n += b.size();
  return n;
}

std::vector<PeerEntry> RoutingTable::entries() const {
  std::vector<PeerEntry> out;
  for (const auto& b : buckets_) out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<PeerEntry> closest_peers(const RoutingTable& table, const DhtKey& key, std::size_t n) {
  auto all = table.entries();
  sort_by_distance(all, key);
  if (all.size() > n) all.resize(n);
  return all;
}

void ProviderStore::add(const ProviderRecord& record) { records_[record.cid][record.provider] = record; }

std::vector<ProviderRecord> ProviderStore::find(const Cid& cid, SimTime now) const {
  std::vector<ProviderRecord> out;
  auto it = records_.find(cid);
  if (it == records_.end()) return out;
  for (const auto& [peer, rec] : it->second) {
    if (!rec.expired(now)) out.push_back(rec);
  }
  return out;
}

std::size_t ProviderStore::purge_expired(SimTime now) {
  std::size_t removed = 0;
  for (auto it = records_.begin(); it != records_.end();) {
    removed += std::erase_if(it->second, [&](const auto& kv) { return kv.second.expired(now); });
    it = it->second.empty() ? records_.erase(it) : std::next(it);
  }
  return removed;
}

std::size_t ProviderStore::size() const {
  std::size_t n = 0;
  for (const auto& [cid, recs] : records_) n += recs.size();
  return n;
}

DhtRoleKind DhtRole::record_inbound(const PeerId& from) {
  inbound_.insert(from);
  if (inbound_.size() >= kServerThreshold) kind_ = DhtRoleKind::Server;
  return kind_;
}

LookupResult iterative_lookup(const PeerId& self, const DhtKey& key, std::vector<PeerEntry> seeds,
                              const LookupQuery& query) {
  std::map<PeerId, PeerEntry> known;
  std::map<PeerId, PeerEntry> responders;
  std::set<PeerId> queried;
  LookupResult result;

  auto distance_of = [&](const PeerId& p) { return xor_distance(dht_key(p), key); };
  std::optional<Distance> best;
  auto learn = [&](const PeerEntry& e) {
    if (e.id == self || known.count(e.id)) return false;
    known.emplace(e.id, e);
    const auto d = distance_of(e.id);
    if (!best || d < *best) {
      best = d;
      return true;
    }
    return false;
  };
  for (const auto& s : seeds) learn(s);

  auto sorted_known = [&] {
    std::vector<PeerEntry> all;
    all.reserve(known.size());
    for (const auto& [id, e] : known) all.push_back(e);
    sort_by_distance(all, key);
    return all;
  };

  auto run_round = [&](const std::vector<PeerEntry>& batch) {
    ++result.rounds;
    result.queried += batch.size();
    for (const auto& p : batch) queried.insert(p.id);
    auto replies = query(batch);
    bool improved = false;
    for (std::size_t i = 0; i < batch.size() && i < replies.size(); ++i) {
      if (!replies[i]) continue;
      auto entry = batch[i];
      entry.server = replies[i]->server;
      known[entry.id].server = entry.server;
      responders[entry.id] = entry;
      for (const auto& peer : replies[i]->closer) improved = learn(peer) || improved;
      result.providers.insert(result.providers.end(), replies[i]->providers.begin(), replies[i]->providers.end());
    }
    return improved;
  };

  // Converge with α-wide rounds.
  while (true) {
    std::vector<PeerEntry> batch;
    for (const auto& e : sorted_known()) {
      if (!queried.count(e.id)) batch.push_back(e);
      if (batch.size() == kLookupAlpha) break;
    }
    if (batch.empty() || !run_round(batch)) break;
  }
  // Make sure every one of the k closest has been asked.
  while (true) {
    auto all = sorted_known();
    if (all.size() > kBucketSize) all.resize(kBucketSize);
    std::vector<PeerEntry> batch;
    for (const auto& e : all) {
      if (!queried.count(e.id)) batch.push_back(e);
    }
    if (batch.empty()) break;
    run_round(batch);
  }

  for (const auto& [id, e] : responders) result.responders.push_back(e);
  sort_by_distance(result.responders, key);
  return result;
}

}  // namespace farmledger
