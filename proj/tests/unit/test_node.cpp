#include <doctest.h>

#include "farmledger/simnet.hpp"
#include "support.hpp"

using namespace farmledger;

namespace {

NodeConfig with_repo(const std::filesystem::path& repo, std::uint8_t seed) {
  NodeConfig c;
  c.seed.fill(seed);
  c.repo = repo;
  return c;
}

}  // namespace

TEST_SUITE("node") {
  TEST_CASE("gc ttl must be positive") {
    Simulation sim(SimConfig{});
    NodeConfig c;
    c.seed.fill(3);
    c.gc_ttl = SimDuration{0};
    CHECK_THROWS_AS(sim.add_node(c), Error);
  }

  TEST_CASE("add is content addressed and auto-pinned") {
    Simulation sim(SimConfig{});
    auto& n = sim.node(0);
    const auto a = n.add(to_bytes("same"));
    const auto b = n.add(to_bytes("same"));
    CHECK(a == b);
    CHECK(n.is_pinned(a));
    CHECK(n.cat(a) == to_bytes("same"));
    CHECK(sim.events_processed() == 0);
  }

  TEST_CASE("pin and unpin are idempotent") {
    Simulation sim(SimConfig{});
    auto& n = sim.node(0);
    const auto cid = n.add(to_bytes("x"));
    n.pin(cid);
    n.pin(cid);
    CHECK(n.pins().roots().size() == 1);
    n.unpin(cid);
    n.unpin(cid);
    CHECK_FALSE(n.is_pinned(cid));
    n.unpin(cid_from_bytes(to_bytes("never pinned")));
    CHECK(n.run_gc(n.now() + std::chrono::hours(13)) == std::vector<Cid>{cid});
  }

  TEST_CASE("gc never evicts the pinned closure") {
    Simulation sim(SimConfig{});
    auto& n = sim.node(0);
    std::mt19937_64 rng(3);
    const auto pinned = n.add(testing::random_bytes(rng, 700000));
    const auto loose = n.add(testing::random_bytes(rng, 300000));
    n.unpin(loose);
    const auto evicted = n.run_gc(n.now() + std::chrono::hours(1000));
    for (const auto& c : evicted) CHECK_FALSE(n.pins().protects(c));
    CHECK(evicted.size() == 3);
    CHECK(n.cat(pinned, SimDuration{0}).size() == 700000);
  }

  TEST_CASE("a local read refreshes last access") {
    Simulation sim(SimConfig{});
    auto& n = sim.node(0);
    const auto cid = n.add(to_bytes("refresh"));
    n.unpin(cid);
    sim.advance(std::chrono::hours(10));
    n.cat(cid);
    CHECK(n.run_gc(n.now() + std::chrono::hours(11)).empty());
    CHECK(n.run_gc(n.now() + std::chrono::hours(12) + std::chrono::seconds(1)).size() == 1);
  }

  TEST_CASE("pins persist in the repo") {
    testing::TempDir dir;
    Cid cid;
    PeerId id;
    {
      Simulation sim(SimConfig{});
      auto& n = sim.add_node(with_repo(dir.path(), 4));
      id = n.id();
      cid = n.add(Bytes(600000, 1));
      const auto dropped = n.add(to_bytes("dropped"));
      n.unpin(dropped);
    }
    Simulation sim(SimConfig{});
    auto& n = sim.add_node(with_repo(dir.path(), 4));
    CHECK(n.id() == id);
    CHECK(n.is_pinned(cid));
    CHECK(n.cat(cid, SimDuration{0}) == Bytes(600000, 1));
    CHECK(n.pins().roots().size() == 1);
    CHECK(n.provided().count(cid) == 1);
  }
}
