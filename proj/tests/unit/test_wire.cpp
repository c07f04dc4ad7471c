#include <doctest.h>

#include "farmledger/wire.hpp"
#include "support.hpp"

using namespace farmledger;

namespace {

PeerId peer(std::uint8_t n) {
  IdentitySeed s{};
  s.fill(n);
  return generate_peer(s);
}

}  // namespace

TEST_SUITE("wire") {
  TEST_CASE("envelope layout is bit exact") {
    Envelope e;
    e.kind = MessageKind::HaveBlock;
    const auto cid = cid_from_bytes(to_bytes("k"));
    e.key = cid.raw();
    e.payload = to_bytes("abc");
    const auto bytes = e.encode();
    REQUIRE(bytes.size() == 43 + 3);
    CHECK(e.wire_size() == bytes.size());
    CHECK(bytes[0] == 0x02);
    const auto raw = cid.raw();
    CHECK(Bytes(bytes.begin() + 1, bytes.begin() + 35) == Bytes(raw.begin(), raw.end()));
    CHECK(Bytes(bytes.begin() + 35, bytes.begin() + 43) == Bytes{0, 0, 0, 0, 0, 0, 0, 3});
    CHECK(Envelope::decode(bytes) == e);
  }

  TEST_CASE("envelope decode rejects damage") {
    Envelope e;
    e.kind = MessageKind::Want;
    e.key = cid_from_bytes(to_bytes("k")).raw();
    auto bytes = e.encode();
    CHECK_THROWS_AS(Envelope::decode(Bytes(bytes.begin(), bytes.end() - 1)), Error);
    auto longer = bytes;
    longer.push_back(1);
    CHECK_THROWS_AS(Envelope::decode(longer), Error);
    auto bad_kind = bytes;
    bad_kind[0] = 0x7f;
    CHECK_THROWS_AS(Envelope::decode(bad_kind), Error);
  }

  TEST_CASE("payload codecs round-trip") {
    const auto a = peer(1), b = peer(2);
    const Multiaddress addr{{10, 0, 0, 7}, 4001, a};
    CHECK(decode_connect(encode_connect(addr), a) == addr);
    CHECK(encode_connect(addr).size() == 6);

    const auto cid = cid_from_bytes(to_bytes("x"));
    ProviderRecord rec{cid, b, Multiaddress{{10, 0, 0, 8}, 4002, b}, SimTime{123456}, std::chrono::hours(24)};
    const auto enc = encode_provider_record(rec);
    CHECK(enc.size() == 34 + 4 + 2 + 8 + 8);
    const auto dec = decode_provider_record(enc, cid);
    CHECK(dec.provider == b);
    CHECK(dec.addr == rec.addr);
    CHECK(dec.published_at == rec.published_at);
    CHECK(dec.ttl == rec.ttl);

    LookupReply reply;
    reply.server = true;
    reply.closer.push_back(PeerEntry{a, addr, SimTime{0}, true});
    reply.providers.push_back(rec);
    const auto back = decode_lookup_reply(encode_lookup_reply(reply), cid);
    CHECK(back.server);
    REQUIRE(back.closer.size() == 1);
    CHECK(back.closer[0].id == a);
    CHECK(back.closer[0].addr == addr);
    CHECK(back.closer[0].server);
    REQUIRE(back.providers.size() == 1);
    CHECK(back.providers[0].provider == b);

    auto truncated = encode_lookup_reply(reply);
    truncated.pop_back();
    CHECK_THROWS_AS(decode_lookup_reply(truncated, cid), Error);
  }

  TEST_CASE("message kind names") {
    CHECK(message_kind_name(MessageKind::Want) == "Want");
    CHECK(message_kind_name(MessageKind::FindProvidersReply) == "FindProvidersReply");
  }
}
