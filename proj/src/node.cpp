#include "farmledger/node.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "farmledger/errors.hpp"
#include "farmledger/simnet.hpp"

namespace farmledger {

namespace fs = std::filesystem;

void PinSet::recompute(BlockSource& source) {
  closure_.clear();
  for (const auto& root : roots_) {
    for (const auto& cid : dag_closure(root, source)) closure_.insert(cid);
  }
}

Node::Node(Simulation& sim, NodeConfig config)
    : sim_(sim),
      config_(std::move(config)),
      id_(generate_peer(config_.seed)),
      addr_{config_.listen_ip, config_.listen_port, id_},
      table_(id_) {
  if (config_.gc_ttl.count() <= 0) throw Error(ErrorCode::InvalidArgument, "gc_ttl must be positive");
  if (config_.repo) load_repo();
}

SimTime Node::now() const { return sim_.now(); }

bool Node::store_provider(const ProviderRecord& record) {
  if (!role_.is_server()) return false;
  providers_.add(record);
  return true;
}

void Node::refresh_peer(const PeerId& peer, std::optional<bool> server) {
  if (peer == id_) return;
  PeerEntry entry;
  entry.id = peer;
  if (auto existing = table_.find(peer)) {
    entry = *existing;
  } else if (auto* node = sim_.find(peer)) {
    entry.addr = node->addr();
  } else {
    entry.addr.peer = peer;
  }
  entry.last_seen = now();
  if (server) entry.server = *server;
  table_.upsert(entry);
}

bool Node::connect(const PeerId& peer) { return sim_.dial(id_, peer); }

void Node::on_dialed(const PeerId& peer, const Multiaddress&) {
  connections_.insert(peer);
  refresh_peer(peer, std::nullopt);
}

std::optional<Envelope> Node::handle(const PeerId& from, const Envelope& message) {
  try {
    switch (message.kind) {
      case MessageKind::Connect:
        role_.record_inbound(from);
        connections_.insert(from);
        refresh_peer(from, std::nullopt);
        return std::nullopt;

      case MessageKind::FindNode:
      case MessageKind::FindProviders: {
        refresh_peer(from, std::nullopt);
        const auto target = Cid::from_raw(message.key);
        LookupReply reply;
        reply.server = role_.is_server();
        for (auto& e : closest_peers(table_, dht_key(target), kBucketSize + 1)) {
          if (e.id != from && reply.closer.size() < kBucketSize) reply.closer.push_back(e);
        }
        Envelope out;
        out.key = message.key;
        if (message.kind == MessageKind::FindProviders) {
          reply.providers = providers_.find(target, now());
          out.kind = MessageKind::FindProvidersReply;
        } else {
          out.kind = MessageKind::FindNodeReply;
        }
        out.payload = encode_lookup_reply(reply);
        return out;
      }

      case MessageKind::AddProvider: {
        refresh_peer(from, std::nullopt);
        const auto cid = Cid::from_raw(message.key);
        const auto record = decode_provider_record(message.payload, cid);
        const bool accepted = record.provider == from && store_provider(record);
        Envelope out;
        out.kind = MessageKind::AddProviderReply;
        out.key = message.key;
        out.payload = {static_cast<std::uint8_t>(accepted ? 1 : 0)};
        return out;
      }

      case MessageKind::Want: {
        const auto cid = Cid::from_raw(message.key);
        auto out = serve_want(store_, cid);
        if (out.kind == MessageKind::HaveBlock) store_.touch(cid, now());
        return out;
      }

      default:
        return std::nullopt;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<std::optional<LookupReply>> Node::query(const std::vector<PeerEntry>& peers, MessageKind kind,
                                                    const Cid& target) {
  const auto expected = kind == MessageKind::FindNode ? MessageKind::FindNodeReply : MessageKind::FindProvidersReply;
  std::vector<std::pair<PeerId, Envelope>> requests;
  requests.reserve(peers.size());
  for (const auto& p : peers) {
    Envelope e;
    e.kind = kind;
    e.key = target.raw();
    requests.emplace_back(p.id, std::move(e));
  }
  auto replies = sim_.call_many(id_, requests);
  std::vector<std::optional<LookupReply>> out(peers.size());
  for (std::size_t i = 0; i < peers.size(); ++i) {
    if (!replies[i] || replies[i]->kind != expected) continue;
    try {
      out[i] = decode_lookup_reply(replies[i]->payload, target);
      refresh_peer(peers[i].id, out[i]->server);
    } catch (const Error&) {
      out[i].reset();
    }
  }
  return out;
}

LookupResult Node::lookup(const Cid& target, MessageKind kind) {
  const auto key = dht_key(target);
  auto seeds = closest_peers(table_, key, kBucketSize);
  last_lookup_ = iterative_lookup(id_, key, std::move(seeds),
                                  [&](const std::vector<PeerEntry>& batch) { return query(batch, kind, target); });
  return last_lookup_;
}

std::vector<PeerId> Node::provide(const Cid& cid) {
  const auto key = dht_key(cid);
  auto result = lookup(cid, MessageKind::FindNode);
  provided_.insert(cid);

  std::vector<PeerEntry> servers;
  for (const auto& r : result.responders) {
    if (r.server) servers.push_back(r);
  }
  if (role_.is_server()) servers.push_back(PeerEntry{id_, addr_, now(), true});
  sort_by_distance(servers, key);
  if (servers.size() > kBucketSize) servers.resize(kBucketSize);
  if (servers.empty()) throw Error(ErrorCode::NoServersReachable, "no DHT server reachable to store " + cid.text());

  const ProviderRecord record{cid, id_, addr_, now(), config_.provider_ttl};
  std::vector<PeerId> stored;
  std::vector<std::pair<PeerId, Envelope>> requests;
  for (const auto& s : servers) {
    if (s.id == id_) {
      if (store_provider(record)) stored.push_back(id_);
      continue;
    }
    Envelope e;
    e.kind = MessageKind::AddProvider;
    e.key = cid.raw();
    e.payload = encode_provider_record(record);
    requests.emplace_back(s.id, std::move(e));
  }
  auto replies = sim_.call_many(id_, requests);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = replies[i];
    if (r && r->kind == MessageKind::AddProviderReply && r->payload == Bytes{1}) stored.push_back(requests[i].first);
  }
  if (stored.empty()) throw Error(ErrorCode::NoServersReachable, "no DHT server accepted " + cid.text());
  return stored;
}

std::vector<ProviderRecord> Node::find_providers(const Cid& cid) {
  auto result = lookup(cid, MessageKind::FindProviders);
  std::map<PeerId, ProviderRecord> merged;
  auto merge = [&](const ProviderRecord& r) {
    if (r.cid != cid || r.expired(now())) return;
    auto [it, inserted] = merged.emplace(r.provider, r);
    if (!inserted && r.published_at > it->second.published_at) it->second = r;
  };
  for (const auto& r : providers_.find(cid, now())) merge(r);
  for (const auto& r : result.providers) merge(r);
  std::vector<ProviderRecord> out;
  out.reserve(merged.size());
  for (auto& [peer, r] : merged) out.push_back(std::move(r));
  return out;
}

Block Node::fetch_block(const Cid& cid, SimDuration deadline) {
  last_fetch_ = FetchStats{};
  if (store_.has(cid)) {
    auto block = store_.get(cid);
    if (block.verify()) {
      store_.touch(cid, now());
      return block;
    }
    store_.erase(cid);
  }

  const auto end = now() + deadline;
  wants_.add(cid, end);
  std::set<PeerId> tried;
  std::set<PeerId> skipped;
  bool saw_corrupt = false;

  auto ask = [&](const std::vector<PeerId>& peers) -> std::optional<Block> {
    std::vector<std::pair<PeerId, Envelope>> requests;
    for (const auto& p : peers) {
      tried.insert(p);
      last_fetch_.contacted.insert(p);
      requests.emplace_back(p, make_want(cid));
    }
    auto replies = sim_.call_many(id_, requests);
    std::optional<Block> found;
    for (std::size_t i = 0; i < peers.size(); ++i) {
      const auto& r = replies[i];
      if (!r || r->kind != MessageKind::HaveBlock) continue;
      Block block{cid, r->payload};
      if (!block.verify()) {
        saw_corrupt = true;
        bad_peers_.insert(peers[i]);
        skipped.insert(peers[i]);
        continue;
      }
      if (!found) found = std::move(block);
    }
    return found;
  };
  auto finish = [&](Block block) {
    store_.put(block, now());
    wants_.received(cid);
    return block;
  };

  std::vector<PeerId> direct(connections_.begin(), connections_.end());
  if (!direct.empty()) {
    if (auto block = ask(direct)) return finish(std::move(*block));
  }

  if (now() < end) {
    last_fetch_.used_dht = true;
    auto providers = find_providers(cid);
    last_fetch_.discovered_providers = providers.size();
    for (const auto& rec : providers) {
      if (now() >= end) break;
      if (rec.provider == id_ || tried.count(rec.provider) || skipped.count(rec.provider)) continue;
      if (!connect(rec.provider)) {
        tried.insert(rec.provider);
        continue;
      }
      if (auto block = ask({rec.provider})) return finish(std::move(*block));
    }
  }

  sim_.wait_until(end);
  wants_.expire(now());
  if (saw_corrupt) throw Error(ErrorCode::IntegrityError, "only corrupt copies of " + cid.text() + " were offered");
  throw Error(ErrorCode::NotFoundAnywhere, "block " + cid.text() + " not found before deadline");
}

Cid Node::add(ByteView data) {
  auto dag = build_dag(data);
  for (const auto& block : dag.blocks) store_.put(block, now());
  pins_.add_root(dag.root);
  pins_.recompute(store_);
  persist_pins();

  std::vector<Cid> announce{dag.root};
  for (const auto& block : dag.blocks) {
    if (block.cid != dag.root) announce.push_back(block.cid);
  }
  for (const auto& cid : announce) {
    try {
      provide(cid);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoServersReachable) throw;
    }
  }
  return dag.root;
}

namespace {

class FetchingSource : public BlockSource {
 public:
  FetchingSource(Node& node, SimTime end, std::vector<Cid>& fetched) : node_(node), end_(end), fetched_(fetched) {}

  std::optional<Bytes> fetch(const Cid& cid) override {
    if (auto local = node_.store().fetch(cid)) {
      if (cid_from_bytes(*local) == cid) return local;
    }
    if (node_.now() >= end_) throw Error(ErrorCode::NotFoundAnywhere, "deadline passed before " + cid.text());
    auto block = node_.fetch_block(cid, end_ - node_.now());
    fetched_.push_back(cid);
    return std::move(block.data);
  }

 private:
  Node& node_;
  SimTime end_;
  std::vector<Cid>& fetched_;
};

}  // namespace

Bytes Node::cat(const Cid& cid, SimDuration deadline) {
  std::vector<Cid> fetched;
  FetchingSource source(*this, now() + deadline, fetched);
  auto content = assemble(cid, source);
  for (const auto& c : dag_closure(cid, store_)) store_.touch(c, now());
  for (const auto& c : fetched) {
    try {
      provide(c);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoServersReachable) throw;
    }
  }
  return content;
}

void Node::pin(const Cid& cid, SimDuration deadline) {
  cat(cid, deadline);
  pins_.add_root(cid);
  pins_.recompute(store_);
  persist_pins();
}

void Node::unpin(const Cid& cid) {
  if (!pins_.is_root(cid)) return;
  pins_.remove_root(cid);
  pins_.recompute(store_);
  persist_pins();
}

std::vector<Cid> Node::run_gc(SimTime now) {
  std::vector<Cid> evicted;
  for (const auto& cid : store_.cids()) {
    if (pins_.protects(cid)) continue;
    const auto last = store_.last_access(cid);
    if (last && now - *last > config_.gc_ttl) {
      store_.erase(cid);
      provided_.erase(cid);
      evicted.push_back(cid);
    }
  }
  return evicted;
}

void Node::republish() {
  providers_.purge_expired(now());
  const auto cids = provided_;
  for (const auto& cid : cids) {
    if (!store_.has(cid)) {
      provided_.erase(cid);
      continue;
    }
    try {
      provide(cid);
    } catch (const Error&) {
    }
  }
}

void Node::persist_pins() {
  if (!config_.repo) return;
  const auto blocks_dir = *config_.repo / "blocks";
  fs::create_directories(blocks_dir);
  {
    std::ofstream pins(*config_.repo / "pins", std::ios::trunc);
    for (const auto& root : pins_.roots()) pins << root.text() << '\n';
  }
  for (const auto& cid : pins_.closure()) {
    const auto path = blocks_dir / cid.text();
    if (fs::exists(path)) continue;
    auto data = store_.fetch(cid);
    if (!data) continue;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data->data()), static_cast<std::streamsize>(data->size()));
  }
  for (const auto& entry : fs::directory_iterator(blocks_dir)) {
    try {
      if (!pins_.protects(parse_cid(entry.path().filename().string()))) fs::remove(entry.path());
    } catch (const Error&) {
    }
  }
}

void Node::load_repo() {
  const auto blocks_dir = *config_.repo / "blocks";
  if (fs::exists(blocks_dir)) {
    for (const auto& entry : fs::directory_iterator(blocks_dir)) {
      std::ifstream in(entry.path(), std::ios::binary);
      Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      try {
        if (cid_from_bytes(data) == parse_cid(entry.path().filename().string())) store_.put(std::move(data), now());
      } catch (const Error&) {
      }
    }
  }
  std::ifstream pins(*config_.repo / "pins");
  std::string line;
  while (std::getline(pins, line)) {
    try {
      const auto cid = parse_cid(line);
      if (store_.has(cid)) pins_.add_root(cid);
    } catch (const Error&) {
    }
  }
  pins_.recompute(store_);
  for (const auto& cid : pins_.closure()) provided_.insert(cid);
}

}  // namespace farmledger
