#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "farmledger/dag.hpp"
#include "farmledger/peer.hpp"
#include "farmledger/simtime.hpp"
#include "farmledger/wire.hpp"

namespace farmledger {

/// Outstanding block requests; entries leave on receipt or deadline.
class WantList {
 public:
  void add(const Cid& cid, SimTime deadline);
  void received(const Cid& cid);
  /// Drops entries whose deadline has passed and returns them.
  std::vector<Cid> expire(SimTime now);
  bool contains(const Cid& cid) const;
  std::size_t size() const { return wanted_.size(); }

 private:
  std::map<Cid, SimTime> wanted_;
};

struct PeerTraffic {
  std::uint64_t bytes_sent = 0;
  std::uint64_t bytes_received = 0;
};

struct BandwidthPoint {
  std::int64_t bucket_start_s = 0;
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;

  bool operator==(const BandwidthPoint&) const = default;
};

/// Per-peer and per-second traffic counters. Counters only grow.
class BandwidthLedger {
 public:
  void record_sent(const PeerId& to, std::uint64_t bytes, SimTime at);
  void record_received(const PeerId& from, std::uint64_t bytes, SimTime at);

  PeerTraffic peer(const PeerId& peer) const;
  std::uint64_t total_sent() const { return total_sent_; }
  std::uint64_t total_received() const { return total_received_; }

  const std::map<std::int64_t, BandwidthPoint>& buckets() const { return buckets_; }

 private:
  std::map<PeerId, PeerTraffic> peers_;
  std::map<std::int64_t, BandwidthPoint> buckets_;
  std::uint64_t total_sent_ = 0;
  std::uint64_t total_received_ = 0;
};

/// One-second buckets covering [from, to], zero-filled.
std::vector<BandwidthPoint> bandwidth_report(const BandwidthLedger& ledger, SimTime from, SimTime to);
/// Element-wise sum of several ledgers' reports over the same window.
std::vector<BandwidthPoint> merge_reports(const std::vector<std::vector<BandwidthPoint>>& reports);

std::string bandwidth_csv(const std::vector<BandwidthPoint>& series);

/// Responder side of a want: HaveBlock with the stored bytes, or DontHave.
Envelope serve_want(const BlockStore& store, const Cid& cid);

Envelope make_want(const Cid& cid);

}  // namespace farmledger
