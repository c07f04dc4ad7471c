#include <doctest.h>

#include <algorithm>

#include "farmledger/simnet.hpp"
#include "support.hpp"

using namespace farmledger;

namespace {

SimConfig config_of(std::size_t n, std::uint64_t seed) {
  SimConfig c;
  c.node_count = n;
  c.seed = seed;
  return c;
}

Bytes payload(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return testing::random_bytes(rng, n);
}

bool has_provider(const std::vector<ProviderRecord>& records, const PeerId& p) {
  return std::any_of(records.begin(), records.end(), [&](const auto& r) { return r.provider == p; });
}

/// Upload on the last node, retrieve on node 3, return the trace.
Digest scripted_run(std::uint64_t seed) {
  Simulation sim(config_of(20, seed));
  const auto cid = sim.node(19).add(payload(300000, 1));
  sim.node(3).cat(cid);
  sim.advance(std::chrono::minutes(5));
  return sim.trace_hash();
}

}  // namespace

TEST_SUITE("simnet") {
  TEST_CASE("xoshiro is reproducible and bounded") {
    Xoshiro256 a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
      const auto x = a.next();
      CHECK(x == b.next());
      differs |= x != c.next();
    }
    CHECK(differs);
    for (int i = 0; i < 1000; ++i) {
      const auto v = a.uniform(5, 50);
      CHECK(v >= 5);
      CHECK(v <= 50);
    }
    CHECK(a.uniform(7, 7) == 7);
  }

  TEST_CASE("identities derive from the seed") {
    Simulation a(config_of(10, 42)), b(config_of(10, 42)), c(config_of(10, 43));
    CHECK(a.peer_ids() == b.peer_ids());
    CHECK(a.peer_ids() != c.peer_ids());
    auto ids = a.peer_ids();
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
  }

  TEST_CASE("single node is an isolated client with an empty trace") {
    Simulation sim(config_of(1, 42));
    CHECK(sim.node(0).role().kind() == DhtRoleKind::Client);
    CHECK(sim.node(0).connections().empty());
    CHECK(sim.trace_hash() == sha256(Bytes{}));
    CHECK(sim.advance(std::chrono::seconds(1)) == 0);
  }

  TEST_CASE("bootstrap upgrades at least one server in 20 nodes") {
    Simulation sim(config_of(20, 42));
    std::size_t servers = 0, edges = 0;
    for (std::size_t i = 0; i < sim.size(); ++i) {
      servers += sim.node(i).role().is_server();
      edges += sim.node(i).role().inbound_count();
    }
    CHECK(servers >= 1);
    // Node i dials min(4, i) earlier nodes.
    CHECK(edges == 0 + 1 + 2 + 3 + 16 * 4);
  }

  TEST_CASE("advance counts delivered events") {
    Simulation sim(config_of(2, 1));
    CHECK(sim.pending() == 0);
    CHECK(sim.advance(std::chrono::seconds(1)) == 0);
    sim.post(sim.node(0).id(), sim.node(1).id(), make_want(cid_from_bytes(to_bytes("x"))), SimDuration{10});
    CHECK(sim.advance(SimDuration{5}) == 0);
    CHECK(sim.advance(SimDuration{5}) == 1);
  }

  TEST_CASE("seeded runs are reproducible") {
    const auto first = scripted_run(42);
    CHECK(first == scripted_run(42));
    CHECK(first != scripted_run(43));
  }

  TEST_CASE("retrieval across the network makes the requester a provider") {
    Simulation sim(config_of(20, 42));
    auto& a = sim.node(19);
    auto& b = sim.node(2);
    const auto data = payload(1 << 20, 2);
    const auto cid = a.add(data);
    CHECK(a.cat(cid) == data);
    CHECK(b.cat(cid) == data);
    CHECK_FALSE(b.is_pinned(cid));
    const auto providers = sim.node(10).find_providers(cid);
    CHECK(has_provider(providers, a.id()));
    CHECK(has_provider(providers, b.id()));

    for (std::size_t i = 0; i < sim.size(); ++i) {
      const auto& n = sim.node(i);
      CAPTURE(i);
      if (n.role().inbound_count() < kServerThreshold) {
        CHECK(n.role().kind() == DhtRoleKind::Client);
        CHECK(n.provider_store().size() == 0);
      } else {
        CHECK(n.role().is_server());
      }
    }
    CHECK(sim.total_bytes_sent() == sim.total_bytes_received());
  }

  TEST_CASE("round trips across sizes") {
    Simulation sim(config_of(8, 5));
    for (std::size_t size : {0ul, 1ul, 262144ul, 262145ul, 3ul << 20}) {
      CAPTURE(size);
      const auto data = payload(size, size);
      const auto cid = sim.node(7).add(data);
      CHECK(sim.node(1).cat(cid) == data);
    }
    CHECK(sim.total_bytes_sent() == sim.total_bytes_received());
  }

  TEST_CASE("provider amplification") {
    Simulation sim(config_of(20, 7));
    const auto cid = sim.node(19).add(payload(1000, 3));
    const std::vector<std::size_t> retrievers{1, 5, 9};
    for (auto r : retrievers) sim.node(r).cat(cid);
    const auto providers = sim.node(14).find_providers(cid);
    CHECK(providers.size() >= retrievers.size() + 1);
    for (auto r : retrievers) CHECK(has_provider(providers, sim.node(r).id()));
  }

  TEST_CASE("content survives the uploader going offline once cached") {
    Simulation sim(config_of(20, 11));
    const auto data = payload(50000, 4);
    const auto cid = sim.node(19).add(data);
    sim.node(4).cat(cid);
    sim.set_online(sim.node(19).id(), false);
    CHECK_FALSE(sim.online(sim.node(19).id()));
    CHECK(sim.node(12).cat(cid) == data);
  }

  TEST_CASE("gc thresholds on cached blocks") {
    Simulation sim(config_of(20, 42));
    const auto cid = sim.node(19).add(payload(2000, 5));
    auto& b = sim.node(0);
    b.cat(cid);
    const auto last = *b.store().last_access(cid);
    CHECK(b.run_gc(last + std::chrono::hours(11) + std::chrono::minutes(59)).empty());
    CHECK(b.run_gc(last + std::chrono::hours(12)).empty());
    CHECK(b.run_gc(last + std::chrono::hours(12) + std::chrono::seconds(1)) == std::vector<Cid>{cid});
    CHECK_FALSE(b.store().has(cid));
  }

  TEST_CASE("pinned content outlives 1000 hours of gc") {
    Simulation sim(config_of(6, 42));
    const auto data = payload(600000, 6);
    const auto cid = sim.node(5).add(data);
    sim.node(2).pin(cid);
    sim.advance(std::chrono::hours(1000));
    CHECK(sim.node(5).cat(cid, SimDuration{0}) == data);
    CHECK(sim.node(2).cat(cid, SimDuration{0}) == data);
    for (const auto& c : sim.node(2).pins().closure()) CHECK(sim.node(2).store().has(c));
  }

  TEST_CASE("scheduled gc evicts unpinned copies") {
    Simulation sim(config_of(6, 42));
    const auto cid = sim.node(5).add(payload(100, 7));
    sim.node(1).cat(cid);
    sim.advance(std::chrono::hours(14));
    CHECK_FALSE(sim.node(1).store().has(cid));
    CHECK(sim.node(5).store().has(cid));
  }

  TEST_CASE("unknown content is NotFoundAnywhere") {
    Simulation sim(config_of(20, 42));
    const auto cid = cid_from_bytes(to_bytes("never added"));
    const auto start = sim.now();
    try {
      sim.node(3).cat(cid, std::chrono::seconds(5));
      FAIL("expected NotFoundAnywhere");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotFoundAnywhere);
    }
    CHECK(sim.now() >= start + std::chrono::seconds(5));
    CHECK(sim.node(3).want_list().size() == 0);
  }

  TEST_CASE("a corrupted block is rejected and its sender recorded") {
    Simulation sim(config_of(20, 42));
    auto& a = sim.node(19);
    const auto cid = a.add(to_bytes("only copy"));
    sim.corrupt_next_block();
    auto& c = sim.node(0);
    try {
      c.cat(cid, std::chrono::seconds(5));
      FAIL("expected IntegrityError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IntegrityError);
    }
    CHECK(c.bad_peers().count(a.id()) == 1);
    CHECK_FALSE(c.store().has(cid));
    CHECK(c.cat(cid) == to_bytes("only copy"));
  }

  TEST_CASE("a dropped message is lost") {
    Simulation sim(config_of(2, 1));
    const auto before = sim.node(1).ledger().total_received();
    sim.drop_next_message();
    sim.post(sim.node(0).id(), sim.node(1).id(), make_want(cid_from_bytes(to_bytes("x"))), SimDuration{10});
    CHECK(sim.advance(std::chrono::seconds(1)) == 1);
    CHECK(sim.node(1).ledger().total_received() == before);
    CHECK(sim.total_bytes_sent() == sim.total_bytes_received());
  }

  TEST_CASE("provide needs a server") {
    Simulation two(config_of(2, 1));
    const auto cid = cid_from_bytes(to_bytes("x"));
    try {
      two.node(1).provide(cid);
      FAIL("expected NoServersReachable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoServersReachable);
    }

    Simulation one(config_of(1, 1));
    one.node(0).role().force_server();
    CHECK(one.node(0).provide(cid) == std::vector<PeerId>{one.node(0).id()});
    CHECK(one.node(0).provider_store().size() == 1);
  }

  TEST_CASE("a fetch contacts only connected peers and discovered providers") {
    Simulation sim(config_of(20, 9));
    const auto cid = sim.node(19).add(payload(1000, 8));
    auto& n = sim.node(0);
    const auto before = n.connections().size();
    n.cat(cid);
    const auto& stats = n.last_fetch();
    CHECK(stats.contacted.size() <= before + stats.discovered_providers);
  }
}
