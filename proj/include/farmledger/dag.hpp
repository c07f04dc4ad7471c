#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "farmledger/bytes.hpp"
#include "farmledger/cid.hpp"
#include "farmledger/simtime.hpp"

namespace farmledger {

inline constexpr std::size_t kDefaultChunkSize = 262144;
/// Links per branch node; bounds a single object at chunk_size * 174 bytes.
inline constexpr std::size_t kMaxLinks = 174;

inline constexpr std::uint8_t kLeafTag = 0x00;
inline constexpr std::uint8_t kBranchTag = 0x01;

std::vector<Bytes> chunk(ByteView data, std::size_t chunk_size = kDefaultChunkSize);

struct Block {
  Cid cid;
  Bytes data;

  static Block from_data(Bytes data) {
    auto cid = cid_from_bytes(data);
    return Block{cid, std::move(data)};
  }
  bool verify() const { return cid_from_bytes(data) == cid; }
};

struct DagLink {
  Cid cid;
  std::uint64_t size = 0;

  bool operator==(const DagLink&) const = default;
};

/// Canonical encoding:
///   Leaf:   0x00 <raw bytes>
///   Branch: 0x01 <u32 link count> (<34-byte cid> <u64 size>)* <u64 total size>
/// All integers big-endian.
struct DagNode {
  enum class Kind : std::uint8_t { Leaf, Branch };

  Kind kind = Kind::Leaf;
  Bytes leaf_data;
  std::vector<DagLink> links;
  std::uint64_t total_size = 0;

  static DagNode leaf(Bytes data);
  static DagNode branch(std::vector<DagLink> links);

  Bytes encode() const;
  /// Throws Error(Malformed) for anything that is not a canonical encoding.
  static DagNode decode(ByteView bytes);

  bool operator==(const DagNode&) const = default;
};

struct DagBuild {
  Cid root;
  std::vector<Block> blocks;  // leaves in content order, then the branch (if any)
};

/// Throws Error(TooLarge) when the content needs more than kMaxLinks chunks.
DagBuild build_dag(ByteView data, std::size_t chunk_size = kDefaultChunkSize);

/// Anything that can hand back the bytes stored under a cid. Returned bytes are
/// untrusted; callers verify them.
class BlockSource {
 public:
  virtual ~BlockSource() = default;
  virtual std::optional<Bytes> fetch(const Cid& cid) = 0;
};

/// Reassembles content. Every block is re-hashed before use.
/// Errors: MissingBlock, IntegrityError, Malformed.
Bytes assemble(const Cid& root, BlockSource& source);

/// All cids reachable from root that are resolvable from `source`, root first.
std::vector<Cid> dag_closure(const Cid& root, BlockSource& source);

/// In-memory block store. Readers share, writers are exclusive.
class BlockStore : public BlockSource {
 public:
  Cid put(Bytes data, SimTime now = SimTime{0});
  void put(const Block& block, SimTime now = SimTime{0});
  /// Throws Error(NotFound).
  Block get(const Cid& cid) const;
  bool has(const Cid& cid) const;
  /// Idempotent.
  void erase(const Cid& cid);
  std::size_t size() const;
  std::vector<Cid> cids() const;

  void touch(const Cid& cid, SimTime now);
  std::optional<SimTime> last_access(const Cid& cid) const;

  std::optional<Bytes> fetch(const Cid& cid) override;

  /// Test hook: overwrite stored bytes without re-hashing.
  void corrupt_for_test(const Cid& cid, Bytes data);

 private:
  struct Entry {
    Bytes data;
    SimTime last_access{0};
  };

  mutable std::shared_mutex mu_;
  std::map<Cid, Entry> blocks_;
};

}  // namespace farmledger
