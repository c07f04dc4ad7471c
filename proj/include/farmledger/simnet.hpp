#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "farmledger/crypto.hpp"
#include "farmledger/exchange.hpp"
#include "farmledger/node.hpp"
#include "farmledger/wire.hpp"

namespace farmledger {

/// xoshiro256** seeded through splitmix64. Fixed so runs replay bit-for-bit
/// on every platform.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform integer in [lo, hi] (Lemire's multiply-shift with rejection).
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);

 private:
  std::uint64_t s_[4];
};

struct SimConfig {
  std::size_t node_count = 1;
  std::uint64_t seed = 0;
  SimDuration latency_min{5};
  SimDuration latency_max{50};
  std::size_t bootstrap_fanout = 4;
  SimDuration gc_ttl = kDefaultGcTtl;
  SimDuration provider_ttl = kDefaultProviderTtl;
  SimDuration gc_interval = std::chrono::hours(1);
  SimDuration republish_interval = std::chrono::hours(12);
  SimDuration call_timeout = std::chrono::seconds(1);
};

/// Derives node i's identity seed from the simulation seed.
IdentitySeed simulation_identity_seed(std::uint64_t seed, std::size_t index);

/// Deterministic in-process network. One event loop owns every node; events
/// are delivered in (deliver_at, seq) order.
class Simulation {
 public:
  explicit Simulation(SimConfig config);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const SimConfig& config() const { return config_; }
  SimTime now() const { return now_; }

  std::size_t size() const { return nodes_.size(); }
  Node& node(std::size_t index) { return *nodes_.at(index); }
  const Node& node(std::size_t index) const { return *nodes_.at(index); }
  Node* find(const PeerId& peer);
  std::vector<PeerId> peer_ids() const;

  /// Adds a node and dials its bootstrap peers.
  Node& add_node(NodeConfig config);

  std::size_t advance(SimDuration duration);
  std::size_t advance_to(SimTime target);

  Digest trace_hash() const { return trace_.finish(); }
  std::size_t events_processed() const { return processed_; }
  std::size_t pending() const { return queue_.size(); }

  void set_online(const PeerId& peer, bool online);
  bool online(const PeerId& peer) const { return offline_.count(peer) == 0; }

  // Transport used by nodes.
  bool dial(const PeerId& from, const PeerId& to);
  std::vector<bool> dial_many(const PeerId& from, const std::vector<PeerId>& targets);
  std::vector<std::optional<Envelope>> call_many(const PeerId& from,
                                                 const std::vector<std::pair<PeerId, Envelope>>& requests);
  std::optional<Envelope> call(const PeerId& from, const PeerId& to, Envelope request);
  /// One-way message with an explicit latency.
  void post(const PeerId& from, const PeerId& to, Envelope message, SimDuration latency);
  /// Runs events until `target` without firing timers.
  void wait_until(SimTime target);

  // Fault injection.
  void drop_next_message() { drop_next_ = true; }
  void corrupt_next_block() { corrupt_next_ = true; }

  std::vector<BandwidthPoint> bandwidth_report(SimTime from, SimTime to) const;
  std::uint64_t total_bytes_sent() const;
  std::uint64_t total_bytes_received() const;

 private:
  struct Event {
    SimTime deliver_at{0};
    std::uint64_t seq = 0;
    SimTime sent_at{0};
    PeerId from;
    PeerId to;
    Envelope message;
    std::uint64_t token = 0;
    bool is_reply = false;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.deliver_at != b.deliver_at ? a.deliver_at > b.deliver_at : a.seq > b.seq;
    }
  };

  SimDuration sample_latency();
  std::uint64_t enqueue(const PeerId& from, const PeerId& to, Envelope message, SimDuration latency,
                        std::uint64_t token, bool is_reply);
  /// Processes events until `done` or the deadline; returns done().
  bool run_until(const std::function<bool()>& done, SimTime deadline);
  void deliver(Event event);
  void fire_timers(SimTime at);
  void bootstrap();

  SimConfig config_;
  Xoshiro256 rng_;
  SimTime now_{0};
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_token_ = 1;
  std::size_t processed_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::map<PeerId, std::size_t> index_;
  std::set<PeerId> offline_;
  std::set<std::uint64_t> waiting_;
  std::set<std::uint64_t> delivered_;
  std::map<std::uint64_t, Envelope> replies_;
  Sha256 trace_;
  SimTime next_gc_;
  SimTime next_republish_;
  bool drop_next_ = false;
  bool corrupt_next_ = false;
};

}  // namespace farmledger
