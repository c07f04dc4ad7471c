#include "farmledger/simnet.hpp"

#include <algorithm>
#include <numeric>

#include "farmledger/errors.hpp"

namespace farmledger {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  for (auto& s : s_) s = splitmix64(seed);
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Xoshiro256::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (hi <= lo) return lo;
  const std::uint64_t range = hi - lo + 1;
  if (range == 0) return next();  // full 64-bit span
  // Lemire: multiply-shift, rejecting the biased low region.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return lo + static_cast<std::uint64_t>(m >> 64);
}

IdentitySeed simulation_identity_seed(std::uint64_t seed, std::size_t index) {
  Bytes material = to_bytes("farmledger-sim-node");
  put_u64_be(material, seed);
  put_u64_be(material, index);
  return sha256(material);
}

Simulation::Simulation(SimConfig config)
    : config_(config), rng_(config.seed), next_gc_(config.gc_interval), next_republish_(config.republish_interval) {
  if (config_.latency_min > config_.latency_max) {
    throw Error(ErrorCode::InvalidArgument, "latency_min must not exceed latency_max");
  }
  for (std::size_t i = 0; i < config_.node_count; ++i) {
    NodeConfig nc;
    nc.seed = simulation_identity_seed(config_.seed, i);
    nc.listen_ip = {10, 0, static_cast<std::uint8_t>((i / 250) & 0xff), static_cast<std::uint8_t>(i % 250 + 1)};
    nc.listen_port = 4001;
    nc.gc_ttl = config_.gc_ttl;
    nc.provider_ttl = config_.provider_ttl;
    auto node = std::make_unique<Node>(*this, nc);
    index_.emplace(node->id(), nodes_.size());
    nodes_.push_back(std::move(node));
  }
  bootstrap();
}

Simulation::~Simulation() = default;

void Simulation::bootstrap() {
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const auto m = std::min(config_.bootstrap_fanout, i);
    std::vector<std::size_t> prior(i);
    std::iota(prior.begin(), prior.end(), 0);
    // Partial Fisher-Yates: the first m slots become a uniform sample.
    std::vector<PeerId> targets;
    for (std::size_t j = 0; j < m; ++j) {
      const auto pick = rng_.uniform(j, i - 1);
      std::swap(prior[j], prior[pick]);
      targets.push_back(nodes_[prior[j]]->id());
    }
    dial_many(nodes_[i]->id(), targets);
  }
}

Node* Simulation::find(const PeerId& peer) {
  auto it = index_.find(peer);
  return it == index_.end() ? nullptr : nodes_[it->second].get();
}

std::vector<PeerId> Simulation::peer_ids() const {
  std::vector<PeerId> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back(n->id());
  return out;
}

Node& Simulation::add_node(NodeConfig config) {
  auto node = std::make_unique<Node>(*this, std::move(config));
  if (index_.count(node->id())) throw Error(ErrorCode::InvalidArgument, "duplicate node identity");
  auto& ref = *node;
  index_.emplace(node->id(), nodes_.size());
  nodes_.push_back(std::move(node));
  std::vector<PeerId> targets;
  for (const auto& b : ref.config().bootstrap) {
    if (find(b.peer)) targets.push_back(b.peer);
  }
  dial_many(ref.id(), targets);
  return ref;
}

void Simulation::set_online(const PeerId& peer, bool online) {
  if (online) {
    offline_.erase(peer);
  } else {
    offline_.insert(peer);
  }
}

SimDuration Simulation::sample_latency() {
  return SimDuration(static_cast<SimDuration::rep>(rng_.uniform(static_cast<std::uint64_t>(config_.latency_min.count()),
                                                                static_cast<std::uint64_t>(config_.latency_max.count()))));
}

std::uint64_t Simulation::enqueue(const PeerId& from, const PeerId& to, Envelope message, SimDuration latency,
                                  std::uint64_t token, bool is_reply) {
  Event e;
  e.deliver_at = now_ + latency;
  e.seq = next_seq_++;
  e.sent_at = now_;
  e.from = from;
  e.to = to;
  e.message = std::move(message);
  e.token = token;
  e.is_reply = is_reply;
  queue_.push(std::move(e));
  return token;
}

void Simulation::post(const PeerId& from, const PeerId& to, Envelope message, SimDuration latency) {
  enqueue(from, to, std::move(message), latency, 0, false);
}

bool Simulation::run_until(const std::function<bool()>& done, SimTime deadline) {
  while (!done()) {
    if (queue_.empty() || queue_.top().deliver_at > deadline) {
      now_ = std::max(now_, deadline);
      return done();
    }
    // Only deliver_at and seq are read while re-heaping, so moving the payload out is safe.
    Event e = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    deliver(std::move(e));
  }
  return true;
}

void Simulation::deliver(Event e) {
  ++processed_;
  now_ = std::max(now_, e.deliver_at);

  if (drop_next_) {
    drop_next_ = false;
    return;
  }
  Node* target = find(e.to);
  Node* sender = find(e.from);
  if (target == nullptr || !online(e.to)) return;

  if (corrupt_next_ && e.message.kind == MessageKind::HaveBlock && !e.message.payload.empty()) {
    corrupt_next_ = false;
    e.message.payload[e.message.payload.size() / 2] ^= 0x5a;
  }

  const auto size = e.message.wire_size();
  if (sender != nullptr) sender->ledger().record_sent(e.to, size, e.sent_at);
  target->ledger().record_received(e.from, size, e.deliver_at);

  Bytes line;
  put_u64_be(line, static_cast<std::uint64_t>(e.deliver_at.count()));
  const auto from_raw = e.from.raw();
  const auto to_raw = e.to.raw();
  line.insert(line.end(), from_raw.begin(), from_raw.end());
  line.insert(line.end(), to_raw.begin(), to_raw.end());
  line.push_back(static_cast<std::uint8_t>(e.message.kind));
  put_u64_be(line, size);
  trace_.update(line);

  if (e.is_reply) {
    if (waiting_.count(e.token)) replies_[e.token] = std::move(e.message);
    return;
  }
  if (waiting_.count(e.token)) delivered_.insert(e.token);
  if (e.message.kind == MessageKind::Connect && sender != nullptr) sender->on_dialed(e.to, target->addr());
  auto reply = target->handle(e.from, e.message);
  if (reply && e.token != 0) enqueue(e.to, e.from, std::move(*reply), sample_latency(), e.token, true);
}

bool Simulation::dial(const PeerId& from, const PeerId& to) { return dial_many(from, {to}).front(); }

std::vector<bool> Simulation::dial_many(const PeerId& from, const std::vector<PeerId>& targets) {
  Node* origin = find(from);
  std::vector<bool> out(targets.size(), false);
  std::vector<std::pair<std::size_t, std::uint64_t>> pending;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& to = targets[i];
    if (to == from || (origin && origin->is_connected(to))) {
      out[i] = true;
      continue;
    }
    if (find(to) == nullptr) continue;
    Envelope e;
    e.kind = MessageKind::Connect;
    e.key = to.raw();
    if (origin) e.payload = encode_connect(origin->addr());
    const auto token = next_token_++;
    waiting_.insert(token);
    enqueue(from, to, std::move(e), sample_latency(), token, false);
    pending.emplace_back(i, token);
  }
  if (pending.empty()) return out;
  run_until(
      [&] {
        return std::all_of(pending.begin(), pending.end(), [&](const auto& p) { return delivered_.count(p.second) != 0; });
      },
      now_ + config_.call_timeout);
  for (const auto& [i, token] : pending) {
    out[i] = delivered_.erase(token) != 0;
    waiting_.erase(token);
  }
  return out;
}

std::vector<std::optional<Envelope>> Simulation::call_many(const PeerId& from,
                                                           const std::vector<std::pair<PeerId, Envelope>>& requests) {
  std::vector<PeerId> targets;
  for (const auto& [to, msg] : requests) targets.push_back(to);
  const auto reachable = dial_many(from, targets);

  std::vector<std::optional<Envelope>> out(requests.size());
  std::vector<std::pair<std::size_t, std::uint64_t>> pending;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!reachable[i] || requests[i].first == from) continue;
    const auto token = next_token_++;
    waiting_.insert(token);
    enqueue(from, requests[i].first, requests[i].second, sample_latency(), token, false);
    pending.emplace_back(i, token);
  }
  run_until(
      [&] {
        return std::all_of(pending.begin(), pending.end(), [&](const auto& p) { return replies_.count(p.second) != 0; });
      },
      now_ + config_.call_timeout);
  for (const auto& [i, token] : pending) {
    if (auto it = replies_.find(token); it != replies_.end()) {
      out[i] = std::move(it->second);
      replies_.erase(it);
    }
    delivered_.erase(token);
    waiting_.erase(token);
  }
  return out;
}

std::optional<Envelope> Simulation::call(const PeerId& from, const PeerId& to, Envelope request) {
  return call_many(from, {{to, std::move(request)}}).front();
}

void Simulation::wait_until(SimTime target) {
  run_until([] { return false; }, target);
}

void Simulation::fire_timers(SimTime at) {
  if (config_.gc_interval.count() > 0 && next_gc_ <= at) {
    for (auto& n : nodes_) {
      if (online(n->id())) n->run_gc(now_);
    }
    next_gc_ += config_.gc_interval;
  }
  if (config_.republish_interval.count() > 0 && next_republish_ <= at) {
    for (auto& n : nodes_) {
      if (online(n->id())) n->republish();
    }
    next_republish_ += config_.republish_interval;
  }
}

std::size_t Simulation::advance_to(SimTime target) {
  const auto before = processed_;
  while (true) {
    SimTime next_timer = SimTime::max();
    if (config_.gc_interval.count() > 0) next_timer = std::min(next_timer, next_gc_);
    if (config_.republish_interval.count() > 0) next_timer = std::min(next_timer, next_republish_);
    if (next_timer > target) {
      wait_until(target);
      break;
    }
    wait_until(next_timer);
    fire_timers(next_timer);
  }
  return processed_ - before;
}

std::size_t Simulation::advance(SimDuration duration) { return advance_to(now_ + duration); }

std::vector<BandwidthPoint> Simulation::bandwidth_report(SimTime from, SimTime to) const {
  std::vector<std::vector<BandwidthPoint>> reports;
  for (const auto& n : nodes_) reports.push_back(farmledger::bandwidth_report(n->ledger(), from, to));
  return merge_reports(reports);
}

std::uint64_t Simulation::total_bytes_sent() const {
  std::uint64_t total = 0;
  for (const auto& n : nodes_) total += n->ledger().total_sent();
  return total;
}

std::uint64_t Simulation::total_bytes_received() const {
  std::uint64_t total = 0;
  for (const auto& n : nodes_) total += n->ledger().total_received();
  return total;
}

}  // namespace farmledger
