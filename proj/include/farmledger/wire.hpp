#pragma once

#include <cstdint>
#include <string_view>

#include "farmledger/bytes.hpp"
#include "farmledger/dht.hpp"
#include "farmledger/multihash.hpp"

namespace farmledger {

enum class MessageKind : std::uint8_t {
  Want = 0x01,
  HaveBlock = 0x02,
  DontHave = 0x03,
  Connect = 0x10,
  FindNode = 0x11,
  FindNodeReply = 0x12,
  FindProviders = 0x13,
  FindProvidersReply = 0x14,
  AddProvider = 0x15,
  AddProviderReply = 0x16,
};

std::string_view message_kind_name(MessageKind kind);

/// Wire format: 1-byte kind, 34-byte key (raw cid or peer id), 8-byte
/// big-endian payload length, payload.
struct Envelope {
  static constexpr std::size_t kHeaderSize = 1 + kMultihashSize + 8;

  MessageKind kind = MessageKind::Want;
  RawMultihash key{};
  Bytes payload;

  std::size_t wire_size() const { return kHeaderSize + payload.size(); }
  Bytes encode() const;
  /// Throws Error(Malformed).
  static Envelope decode(ByteView bytes);

  bool operator==(const Envelope&) const = default;
};

// DHT payload codecs.
Bytes encode_connect(const Multiaddress& from);
Multiaddress decode_connect(ByteView payload, const PeerId& from);

Bytes encode_lookup_reply(const LookupReply& reply);
LookupReply decode_lookup_reply(ByteView payload, const Cid& cid);

Bytes encode_provider_record(const ProviderRecord& record);
ProviderRecord decode_provider_record(ByteView payload, const Cid& cid);

}  // namespace farmledger
