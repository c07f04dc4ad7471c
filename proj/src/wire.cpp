#include "farmledger/wire.hpp"

#include <cstring>

#include "farmledger/errors.hpp"

namespace farmledger {

std::string_view message_kind_name(MessageKind kind) {
  switch (kind) {
    case MessageKind::Want: return "Want";
    case MessageKind::HaveBlock: return "HaveBlock";
    case MessageKind::DontHave: return "DontHave";
    case MessageKind::Connect: return "Connect";
    case MessageKind::FindNode: return "FindNode";
    case MessageKind::FindNodeReply: return "FindNodeReply";
    case MessageKind::FindProviders: return "FindProviders";
    case MessageKind::FindProvidersReply: return "FindProvidersReply";
    case MessageKind::AddProvider: return "AddProvider";
    case MessageKind::AddProviderReply: return "AddProviderReply";
  }
  return "Unknown";
}

namespace {

bool known_kind(std::uint8_t v) {
  switch (static_cast<MessageKind>(v)) {
    case MessageKind::Want:
    case MessageKind::HaveBlock:
    case MessageKind::DontHave:
    case MessageKind::Connect:
    case MessageKind::FindNode:
    case MessageKind::FindNodeReply:
    case MessageKind::FindProviders:
    case MessageKind::FindProvidersReply:
    case MessageKind::AddProvider:
    case MessageKind::AddProviderReply:
      return true;
  }
  return false;
}

void put_raw(Bytes& out, const RawMultihash& raw) { out.insert(out.end(), raw.begin(), raw.end()); }

void put_addr(Bytes& out, const Multiaddress& addr) {
  out.insert(out.end(), addr.ip.begin(), addr.ip.end());
  put_u16_be(out, addr.port);
}

Multiaddress read_addr(ByteReader& in, const PeerId& peer) {
  Multiaddress addr;
  auto ip = in.take(4);
  std::memcpy(addr.ip.data(), ip.data(), 4);
  addr.port = in.u16();
  addr.peer = peer;
  return addr;
}

PeerId read_peer(ByteReader& in) {
  try {
    return PeerId::from_raw(in.take(kMultihashSize));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Malformed) throw;
    throw Error(ErrorCode::Malformed, std::string("bad peer id: ") + e.what());
  }
}

void put_record(Bytes& out, const ProviderRecord& r) {
  put_raw(out, r.provider.raw());
  put_addr(out, r.addr);
  put_u64_be(out, static_cast<std::uint64_t>(r.published_at.count()));
  put_u64_be(out, static_cast<std::uint64_t>(r.ttl.count()));
}

ProviderRecord read_record(ByteReader& in, const Cid& cid) {
  ProviderRecord r;
  r.cid = cid;
  r.provider = read_peer(in);
  r.addr = read_addr(in, r.provider);
  r.published_at = SimTime(static_cast<SimTime::rep>(in.u64()));
  r.ttl = SimDuration(static_cast<SimDuration::rep>(in.u64()));
  return r;
}

}  // namespace

Bytes Envelope::encode() const {
  Bytes out;
  out.reserve(wire_size());
  out.push_back(static_cast<std::uint8_t>(kind));
  put_raw(out, key);
  put_u64_be(out, payload.size());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Envelope Envelope::decode(ByteView bytes) {
  ByteReader in(bytes);
  Envelope e;
  const auto kind = in.u8();
  if (!known_kind(kind)) throw Error(ErrorCode::Malformed, "unknown message kind");
  e.kind = static_cast<MessageKind>(kind);
  auto key = in.take(kMultihashSize);
  std::memcpy(e.key.data(), key.data(), key.size());
  const auto len = in.u64();
  if (len != in.remaining()) throw Error(ErrorCode::Malformed, "payload length mismatch");
  auto payload = in.take(static_cast<std::size_t>(len));
  e.payload.assign(payload.begin(), payload.end());
  return e;
}

Bytes encode_connect(const Multiaddress& from) {
  Bytes out;
  put_addr(out, from);
  return out;
}

Multiaddress decode_connect(ByteView payload, const PeerId& from) {
  ByteReader in(payload);
  auto addr = read_addr(in, from);
  if (!in.done()) throw Error(ErrorCode::Malformed, "trailing bytes in connect");
  return addr;
}

Bytes encode_lookup_reply(const LookupReply& reply) {
  Bytes out;
  out.push_back(reply.server ? 1 : 0);
  put_u32_be(out, static_cast<std::uint32_t>(reply.closer.size()));
  for (const auto& p : reply.closer) {
    put_raw(out, p.id.raw());
    put_addr(out, p.addr);
    out.push_back(p.server ? 1 : 0);
  }
  put_u32_be(out, static_cast<std::uint32_t>(reply.providers.size()));
  for (const auto& r : reply.providers) put_record(out, r);
  return out;
}

LookupReply decode_lookup_reply(ByteView payload, const Cid& cid) {
  ByteReader in(payload);
  LookupReply reply;
  reply.server = in.u8() != 0;
  const auto peers = in.u32();
  for (std::uint32_t i = 0; i < peers; ++i) {
    PeerEntry e;
    e.id = read_peer(in);
    e.addr = read_addr(in, e.id);
    e.server = in.u8() != 0;
    reply.closer.push_back(e);
  }
  const auto records = in.u32();
  for (std::uint32_t i = 0; i < records; ++i) reply.providers.push_back(read_record(in, cid));
  if (!in.done()) throw Error(ErrorCode::Malformed, "trailing bytes in lookup reply");
  return reply;
}

Bytes encode_provider_record(const ProviderRecord& record) {
  Bytes out;
  put_record(out, record);
  return out;
}

ProviderRecord decode_provider_record(ByteView payload, const Cid& cid) {
  ByteReader in(payload);
  auto r = read_record(in, cid);
  if (!in.done()) throw Error(ErrorCode::Malformed, "trailing bytes in provider record");
  return r;
}

}  // namespace farmledger
