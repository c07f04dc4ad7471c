#include "farmledger/dag.hpp"

#include <mutex>
#include <set>

#include "farmledger/errors.hpp"

namespace farmledger {

std::vector<Bytes> chunk(ByteView data, std::size_t chunk_size) {
  if (chunk_size == 0) throw Error(ErrorCode::InvalidArgument, "chunk_size must be at least 1");
  std::vector<Bytes> out;
  if (data.empty()) {
    out.emplace_back();
    return out;
  }
  for (std::size_t off = 0; off < data.size(); off += chunk_size) {
    const auto n = std::min(chunk_size, data.size() - off);
    out.emplace_back(data.begin() + static_cast<std::ptrdiff_t>(off),
                     data.begin() + static_cast<std::ptrdiff_t>(off + n));
  }
  return out;
}

DagNode DagNode::leaf(Bytes data) {
  DagNode node;
  node.kind = Kind::Leaf;
  node.total_size = data.size();
  node.leaf_data = std::move(data);
  return node;
}

DagNode DagNode::branch(std::vector<DagLink> links) {
  DagNode node;
  node.kind = Kind::Branch;
  for (const auto& link : links) node.total_size += link.size;
  node.links = std::move(links);
  return node;
}

Bytes DagNode::encode() const {
  Bytes out;
  if (kind == Kind::Leaf) {
    out.reserve(1 + leaf_data.size());
    out.push_back(kLeafTag);
    out.insert(out.end(), leaf_data.begin(), leaf_data.end());
    return out;
  }
  out.reserve(1 + 4 + links.size() * (kMultihashSize + 8) + 8);
  out.push_back(kBranchTag);
  put_u32_be(out, static_cast<std::uint32_t>(links.size()));
  for (const auto& link : links) {
    const auto raw = link.cid.raw();
    out.insert(out.end(), raw.begin(), raw.end());
    put_u64_be(out, link.size);
  }
  put_u64_be(out, total_size);
  return out;
}

DagNode DagNode::decode(ByteView bytes) {
  if (bytes.empty()) throw Error(ErrorCode::Malformed, "empty dag node");
  if (bytes[0] == kLeafTag) return leaf(Bytes(bytes.begin() + 1, bytes.end()));
  if (bytes[0] != kBranchTag) throw Error(ErrorCode::Malformed, "unknown dag node tag");

  ByteReader in(bytes.subspan(1));
  const auto count = in.u32();
  if (in.remaining() != static_cast<std::size_t>(count) * (kMultihashSize + 8) + 8) {
    throw Error(ErrorCode::Malformed, "branch length does not match link count");
  }
  std::vector<DagLink> links;
  links.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    DagLink link;
    try {
      link.cid = Cid::from_raw(in.take(kMultihashSize));
    } catch (const Error& e) {
      throw Error(ErrorCode::Malformed, std::string("bad link cid: ") + e.what());
    }
    link.size = in.u64();
    links.push_back(link);
  }
  const auto total = in.u64();
  auto node = branch(std::move(links));
  if (node.total_size != total) throw Error(ErrorCode::Malformed, "branch total_size mismatch");
  return node;
}

DagBuild build_dag(ByteView data, std::size_t chunk_size) {
  if (chunk_size == 0) throw Error(ErrorCode::InvalidArgument, "chunk_size must be at least 1");
  if (data.size() > chunk_size * kMaxLinks) {
    throw Error(ErrorCode::TooLarge, "content of " + std::to_string(data.size()) + " bytes exceeds the " +
                                         std::to_string(chunk_size * kMaxLinks) + "-byte object limit");
  }
  DagBuild out;
  auto pieces = chunk(data, chunk_size);
  if (pieces.size() == 1) {
    auto block = Block::from_data(DagNode::leaf(std::move(pieces.front())).encode());
    out.root = block.cid;
    out.blocks.push_back(std::move(block));
    return out;
  }
  std::vector<DagLink> links;
  links.reserve(pieces.size());
  for (auto& piece : pieces) {
    const auto size = piece.size();
    auto block = Block::from_data(DagNode::leaf(std::move(piece)).encode());
    links.push_back({block.cid, size});
    out.blocks.push_back(std::move(block));
  }
  auto root = Block::from_data(DagNode::branch(std::move(links)).encode());
  out.root = root.cid;
  out.blocks.push_back(std::move(root));
  return out;
}

namespace {

DagNode fetch_verified(const Cid& cid, BlockSource& source) {
  auto bytes = source.fetch(cid);
  if (!bytes) throw Error(ErrorCode::MissingBlock, "missing block " + cid.text());
  if (cid_from_bytes(*bytes) != cid) throw Error(ErrorCode::IntegrityError, "block " + cid.text() + " failed verification");
  return DagNode::decode(*bytes);
}

void assemble_into(const Cid& cid, BlockSource& source, Bytes& out, std::size_t depth) {
  // Built DAGs are one level deep.
  if (depth > 8) throw Error(ErrorCode::Malformed, "dag too deep");
  auto node = fetch_verified(cid, source);
  if (node.kind == DagNode::Kind::Leaf) {
    out.insert(out.end(), node.leaf_data.begin(), node.leaf_data.end());
    return;
  }
  for (const auto& link : node.links) {
    const auto before = out.size();
    assemble_into(link.cid, source, out, depth + 1);
    if (out.size() - before != link.size) {
      throw Error(ErrorCode::IntegrityError, "child " + link.cid.text() + " size does not match its link");
    }
  }
}

}  // namespace

Bytes assemble(const Cid& root, BlockSource& source) {
  Bytes out;
  assemble_into(root, source, out, 0);
  return out;
}

std::vector<Cid> dag_closure(const Cid& root, BlockSource& source) {
  std::vector<Cid> out;
  std::set<Cid> seen;
  std::vector<Cid> stack{root};
  while (!stack.empty()) {
    auto cid = stack.back();
    stack.pop_back();
    if (!seen.insert(cid).second) continue;
    auto bytes = source.fetch(cid);
    if (!bytes) continue;
    out.push_back(cid);
    try {
      auto node = DagNode::decode(*bytes);
      for (auto it = node.links.rbegin(); it != node.links.rend(); ++it) stack.push_back(it->cid);
    } catch (const Error&) {
    }
  }
  return out;
}

Cid BlockStore::put(Bytes data, SimTime now) {
  auto block = Block::from_data(std::move(data));
  const auto cid = block.cid;
  std::unique_lock lock(mu_);
  auto [it, inserted] = blocks_.try_emplace(cid);
  if (inserted) it->second.data = std::move(block.data);
  it->second.last_access = std::max(it->second.last_access, now);
  return cid;
}

void BlockStore::put(const Block& block, SimTime now) {
  if (!block.verify()) throw Error(ErrorCode::IntegrityError, "refusing unverified block " + block.cid.text());
  std::unique_lock lock(mu_);
  auto [it, inserted] = blocks_.try_emplace(block.cid);
  if (inserted) it->second.data = block.data;
  it->second.last_access = std::max(it->second.last_access, now);
}

Block BlockStore::get(const Cid& cid) const {
  std::shared_lock lock(mu_);
  auto it = blocks_.find(cid);
  if (it == blocks_.end()) throw Error(ErrorCode::NotFound, "block not found: " + cid.text());
  return Block{cid, it->second.data};
}

bool BlockStore::has(const Cid& cid) const {
  std::shared_lock lock(mu_);
  return blocks_.count(cid) != 0;
}

void BlockStore::erase(const Cid& cid) {
  std::unique_lock lock(mu_);
  blocks_.erase(cid);
}

std::size_t BlockStore::size() const {
  std::shared_lock lock(mu_);
  return blocks_.size();
}

std::vector<Cid> BlockStore::cids() const {
  std::shared_lock lock(mu_);
  std::vector<Cid> out;
  out.reserve(blocks_.size());
  for (const auto& [cid, entry] : blocks_) out.push_back(cid);
  return out;
}

void BlockStore::touch(const Cid& cid, SimTime now) {
  std::unique_lock lock(mu_);
  auto it = blocks_.find(cid);
  if (it != blocks_.end()) it->second.last_access = std::max(it->second.last_access, now);
}

std::optional<SimTime> BlockStore::last_access(const Cid& cid) const {
  std::shared_lock lock(mu_);
  auto it = blocks_.find(cid);
  if (it == blocks_.end()) return std::nullopt;
  return it->second.last_access;
}

std::optional<Bytes> BlockStore::fetch(const Cid& cid) {
  std::shared_lock lock(mu_);
  auto it = blocks_.find(cid);
  if (it == blocks_.end()) return std::nullopt;
  return it->second.data;
}

void BlockStore::corrupt_for_test(const Cid& cid, Bytes data) {
  std::unique_lock lock(mu_);
  blocks_[cid].data = std::move(data);
}

}  // namespace farmledger
