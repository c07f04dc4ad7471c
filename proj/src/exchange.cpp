#include "farmledger/exchange.hpp"

#include <sstream>

namespace farmledger {

namespace {

std::int64_t bucket_of(SimTime t) { return std::chrono::duration_cast<std::chrono::seconds>(t).count(); }

}  // namespace

void WantList::add(const Cid& cid, SimTime deadline) { wanted_[cid] = deadline; }

void WantList::received(const Cid& cid) { wanted_.erase(cid); }

std::vector<Cid> WantList::expire(SimTime now) {
  std::vector<Cid> out;
  for (auto it = wanted_.begin(); it != wanted_.end();) {
    if (it->second <= now) {
      out.push_back(it->first);
      it = wanted_.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

bool WantList::contains(const Cid& cid) const { return wanted_.count(cid) != 0; }

void BandwidthLedger::record_sent(const PeerId& to, std::uint64_t bytes, SimTime at) {
  peers_[to].bytes_sent += bytes;
  auto& b = buckets_[bucket_of(at)];
  b.bucket_start_s = bucket_of(at);
  b.bytes_out += bytes;
  total_sent_ += bytes;
}

void BandwidthLedger::record_received(const PeerId& from, std::uint64_t bytes, SimTime at) {
  peers_[from].bytes_received += bytes;
  auto& b = buckets_[bucket_of(at)];
  b.bucket_start_s = bucket_of(at);
  b.bytes_in += bytes;
  total_received_ += bytes;
}

PeerTraffic BandwidthLedger::peer(const PeerId& peer) const {
  auto it = peers_.find(peer);
  return it == peers_.end() ? PeerTraffic{} : it->second;
}

std::vector<BandwidthPoint> bandwidth_report(const BandwidthLedger& ledger, SimTime from, SimTime to) {
  std::vector<BandwidthPoint> out;
  const auto first = bucket_of(from);
  const auto last = bucket_of(to);
  if (last < first) return out;
  out.reserve(static_cast<std::size_t>(last - first + 1));
  for (auto s = first; s <= last; ++s) {
    auto it = ledger.buckets().find(s);
    out.push_back(it == ledger.buckets().end() ? BandwidthPoint{s, 0, 0} : it->second);
  }
  return out;
}

std::vector<BandwidthPoint> merge_reports(const std::vector<std::vector<BandwidthPoint>>& reports) {
  std::vector<BandwidthPoint> out;
  for (const auto& report : reports) {
    if (out.empty()) {
      out = report;
      continue;
    }
    for (std::size_t i = 0; i < report.size() && i < out.size(); ++i) {
      out[i].bytes_in += report[i].bytes_in;
      out[i].bytes_out += report[i].bytes_out;
    }
  }
  return out;
}

std::string bandwidth_csv(const std::vector<BandwidthPoint>& series) {
  std::ostringstream out;
  out << "bucket_start_s,bytes_in,bytes_out\n";
  for (const auto& p : series) out << p.bucket_start_s << ',' << p.bytes_in << ',' << p.bytes_out << '\n';
  return out.str();
}

Envelope make_want(const Cid& cid) {
  Envelope e;
  e.kind = MessageKind::Want;
  e.key = cid.raw();
  return e;
}

Envelope serve_want(const BlockStore& store, const Cid& cid) {
  Envelope e;
  e.key = cid.raw();
  if (store.has(cid)) {
    e.kind = MessageKind::HaveBlock;
    e.payload = store.get(cid).data;
  } else {
    e.kind = MessageKind::DontHave;
  }
  return e;
}

}  // namespace farmledger
