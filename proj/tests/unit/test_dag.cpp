#include <doctest.h>

#include <map>
#include <set>
#include <thread>

#include "farmledger/dag.hpp"
#include "farmledger/errors.hpp"
#include "support.hpp"

using namespace farmledger;

namespace {

ErrorCode assemble_error(const Cid& root, BlockSource& source) {
  try {
    assemble(root, source);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

struct MapSource : BlockSource {
  std::map<Cid, Bytes> blocks;
  std::optional<Bytes> fetch(const Cid& cid) override {
    auto it = blocks.find(cid);
    if (it == blocks.end()) return std::nullopt;
    return it->second;
  }
};

}  // namespace

TEST_SUITE("dag") {
  TEST_CASE("chunk sizes") {
    CHECK(chunk({}).size() == 1);
    CHECK(chunk({}).front().empty());
    CHECK(chunk(Bytes(1 << 20)).size() == 4);

    std::mt19937_64 rng(5);
    const auto data = testing::random_bytes(rng, 700001);
    const auto pieces = chunk(data);
    REQUIRE(pieces.size() == 3);
    CHECK(pieces[0].size() == 262144);
    CHECK(pieces[1].size() == 262144);
    CHECK(pieces[2].size() == 175713);
    Bytes joined;
    for (const auto& p : pieces) joined.insert(joined.end(), p.begin(), p.end());
    CHECK(joined == data);

    CHECK(chunk(Bytes(10), 3).size() == 4);
    CHECK(chunk(Bytes(9), 3).size() == 3);
    CHECK_THROWS_AS(chunk(Bytes(9), 0), Error);
  }

  TEST_CASE("canonical node encoding is bit exact") {
    const auto leaf = DagNode::leaf(to_bytes("hi"));
    CHECK(leaf.encode() == Bytes{0x00, 'h', 'i'});

    const auto a = cid_from_bytes(to_bytes("a"));
    const auto b = cid_from_bytes(to_bytes("b"));
    const auto branch = DagNode::branch({{a, 3}, {b, 258}});
    CHECK(branch.total_size == 261);
    const auto enc = branch.encode();
    REQUIRE(enc.size() == 1 + 4 + 2 * (34 + 8) + 8);
    CHECK(enc[0] == 0x01);
    CHECK(Bytes(enc.begin() + 1, enc.begin() + 5) == Bytes{0, 0, 0, 2});
    const auto a_raw = a.raw();
    CHECK(Bytes(enc.begin() + 5, enc.begin() + 39) == Bytes(a_raw.begin(), a_raw.end()));
    CHECK(Bytes(enc.begin() + 39, enc.begin() + 47) == Bytes{0, 0, 0, 0, 0, 0, 0, 3});
    CHECK(Bytes(enc.begin() + 81, enc.begin() + 89) == Bytes{0, 0, 0, 0, 0, 0, 1, 2});
    CHECK(Bytes(enc.end() - 8, enc.end()) == Bytes{0, 0, 0, 0, 0, 0, 1, 5});

    CHECK(DagNode::decode(enc) == branch);
    CHECK(DagNode::decode(leaf.encode()) == leaf);
  }

  TEST_CASE("decode rejects non-canonical bytes") {
    const auto a = cid_from_bytes(to_bytes("a"));
    auto enc = DagNode::branch({{a, 3}}).encode();
    CHECK_THROWS_AS(DagNode::decode({}), Error);
    CHECK_THROWS_AS(DagNode::decode(Bytes{0x02}), Error);

    auto bad_total = enc;
    bad_total.back() ^= 1;
    CHECK_THROWS_AS(DagNode::decode(bad_total), Error);

    auto trailing = enc;
    trailing.push_back(0);
    CHECK_THROWS_AS(DagNode::decode(trailing), Error);

    auto truncated = enc;
    truncated.pop_back();
    CHECK_THROWS_AS(DagNode::decode(truncated), Error);

    auto bad_cid = enc;
    bad_cid[5] = 0x11;
    CHECK_THROWS_AS(DagNode::decode(bad_cid), Error);
  }

  TEST_CASE("build_dag shapes") {
    const auto small = build_dag(to_bytes("hello"));
    REQUIRE(small.blocks.size() == 1);
    CHECK(small.root == cid_from_bytes(DagNode::leaf(to_bytes("hello")).encode()));

    const auto big = build_dag(Bytes(1 << 20, 1));
    REQUIRE(big.blocks.size() == 5);
    const auto root = DagNode::decode(big.blocks.back().data);
    CHECK(big.blocks.back().cid == big.root);
    CHECK(root.kind == DagNode::Kind::Branch);
    CHECK(root.links.size() == 4);
    CHECK(root.total_size == 1048576);
    for (std::size_t i = 0; i < 4; ++i) CHECK(root.links[i].cid == big.blocks[i].cid);

    const auto empty = build_dag({});
    REQUIRE(empty.blocks.size() == 1);
    CHECK(empty.blocks[0].data == Bytes{0x00});
  }

  TEST_CASE("fan-out cap") {
    CHECK_NOTHROW(build_dag(Bytes(174 * 16, 0), 16));
    CHECK_THROWS_AS(build_dag(Bytes(174 * 16 + 1, 0), 16), Error);
    try {
      build_dag(Bytes(175 * 16, 0), 16);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooLarge);
    }
  }

  TEST_CASE("assemble round-trips random sizes") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
      const std::size_t size = rng() % (1 << 12);
      const auto data = testing::random_bytes(rng, size);
      const auto dag = build_dag(data, 64 + rng() % 200);
      BlockStore store;
      for (const auto& b : dag.blocks) store.put(b);
      REQUIRE(assemble(dag.root, store) == data);
    }
  }

  TEST_CASE("missing and corrupted blocks") {
    std::mt19937_64 rng(23);
    const auto data = testing::random_bytes(rng, 1000);
    const auto dag = build_dag(data, 256);
    REQUIRE(dag.blocks.size() == 5);

    BlockStore store;
    for (const auto& b : dag.blocks) store.put(b);
    store.erase(dag.blocks[2].cid);
    store.erase(dag.blocks[2].cid);  // idempotent
    try {
      assemble(dag.root, store);
      FAIL("expected MissingBlock");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingBlock);
      CHECK(std::string(e.what()).find(dag.blocks[2].cid.text()) != std::string::npos);
    }

    for (std::size_t victim = 0; victim < dag.blocks.size(); ++victim) {
      BlockStore s;
      for (const auto& b : dag.blocks) s.put(b);
      auto bad = dag.blocks[victim].data;
      bad[bad.size() / 2] ^= 0x40;
      s.corrupt_for_test(dag.blocks[victim].cid, bad);
      CHECK(assemble_error(dag.root, s) == ErrorCode::IntegrityError);
    }
  }

  TEST_CASE("a block that hashes correctly but lies about sizes is rejected") {
    MapSource src;
    const auto leaf = DagNode::leaf(to_bytes("abc")).encode();
    const auto leaf_cid = cid_from_bytes(leaf);
    src.blocks[leaf_cid] = leaf;
    const auto root = DagNode::branch({{leaf_cid, 5}}).encode();
    const auto root_cid = cid_from_bytes(root);
    src.blocks[root_cid] = root;
    CHECK_THROWS_AS(assemble(root_cid, src), Error);
  }

  TEST_CASE("dag_closure lists the root first, then leaves in order") {
    const auto dag = build_dag(Bytes(100, 9), 30);
    BlockStore store;
    for (const auto& b : dag.blocks) store.put(b);
    const auto closure = dag_closure(dag.root, store);
    std::set<Cid> distinct_cids;
    for (const auto& b : dag.blocks) distinct_cids.insert(b.cid);
    REQUIRE(closure.size() == distinct_cids.size());
    CHECK(distinct_cids.size() == 3);
    CHECK(closure.front() == dag.root);
    // Identical leaves dedupe in the store but the closure still has one entry per cid.
    const auto distinct = build_dag(Bytes{1, 2, 3, 4, 5, 6}, 2);
    BlockStore s2;
    for (const auto& b : distinct.blocks) s2.put(b);
    CHECK(dag_closure(distinct.root, s2).size() == 4);
  }

  TEST_CASE("block store contract") {
    BlockStore store;
    CHECK_THROWS_AS(store.get(cid_from_bytes(to_bytes("nothing"))), Error);
    const auto c1 = store.put(to_bytes("same"));
    const auto c2 = store.put(to_bytes("same"));
    CHECK(c1 == c2);
    CHECK(store.size() == 1);
    CHECK(store.has(c1));
    CHECK(store.get(c1).data == to_bytes("same"));
    CHECK_THROWS_AS(store.put(Block{c1, to_bytes("other")}), Error);

    store.touch(c1, SimTime{500});
    CHECK(store.last_access(c1) == SimTime{500});
    store.touch(c1, SimTime{100});
    CHECK(store.last_access(c1) == SimTime{500});
    store.erase(c1);
    CHECK_FALSE(store.has(c1));
    CHECK_FALSE(store.last_access(c1).has_value());
  }

  TEST_CASE("storing the same content twice yields identical block sets") {
    std::mt19937_64 rng(31);
    const auto data = testing::random_bytes(rng, 3000);
    BlockStore store;
    for (const auto& b : build_dag(data, 500).blocks) store.put(b);
    const auto before = store.cids();
    for (const auto& b : build_dag(data, 500).blocks) store.put(b);
    CHECK(store.cids() == before);
  }

  TEST_CASE("concurrent readers and writers") {
    BlockStore store;
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&store, t] {
        for (int i = 0; i < 200; ++i) {
          const auto cid = store.put(to_bytes("block-" + std::to_string(i % 50) + "-" + std::to_string(t % 2)));
          CHECK(store.get(cid).verify());
        }
      });
    }
    for (auto& th : threads) th.join();
    CHECK(store.size() == 100);
  }
}
