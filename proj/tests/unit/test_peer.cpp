#include <doctest.h>

#include "../oracles/ref_codecs.hpp"
#include "../oracles/ref_sha256.hpp"
#include "farmledger/peer.hpp"
#include "support.hpp"

using namespace farmledger;

namespace {

IdentitySeed seed_of(std::uint8_t fill) {
  IdentitySeed s{};
  s.fill(fill);
  return s;
}

ErrorCode multiaddr_error(const std::string& text) {
  try {
    parse_multiaddr(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("peer") {
  TEST_CASE("peer ids derive from the seed") {
    CHECK(generate_peer(seed_of(1)) == generate_peer(seed_of(1)));
    CHECK(generate_peer(seed_of(1)) != generate_peer(seed_of(2)));

    const auto zero = generate_peer(seed_of(0));
    const auto expected = oracle::base58(oracle::cid_bytes(oracle::sha256(std::vector<std::uint8_t>(32, 0))));
    CHECK(zero.text() == expected);
    CHECK(zero.text().size() == 46);
    CHECK(zero.text().substr(0, 2) == "Qm");
  }

  TEST_CASE("multiaddress round trip") {
    const auto id = generate_peer(seed_of(9));
    const std::string text = "/ip4/127.0.0.1/tcp/4001/p2p/" + id.text();
    const auto m = parse_multiaddr(text);
    CHECK(m.ip == Ipv4{127, 0, 0, 1});
    CHECK(m.port == 4001);
    CHECK(m.peer == id);
    CHECK(render_multiaddr(m) == text);

    for (std::uint16_t port : {0, 1, 65535}) {
      Multiaddress x{{10, 0, 0, 255}, port, id};
      CHECK(parse_multiaddr(render_multiaddr(x)) == x);
    }
  }

  TEST_CASE("malformed multiaddresses") {
    const auto id = generate_peer(seed_of(9)).text();
    const std::vector<std::string> bad = {
        "/ip4/127.0.0.1/udp/4001/p2p/" + id,
        "/ip4/127.0.0.1/tcp/70000/p2p/" + id,
        "/ip4/127.0.0.1/tcp/04001/p2p/" + id,
        "/ip4/127.0.0.1/tcp//p2p/" + id,
        "/ip4/256.0.0.1/tcp/4001/p2p/" + id,
        "/ip4/1.2.3/tcp/4001/p2p/" + id,
        "/ip4/01.2.3.4/tcp/4001/p2p/" + id,
        "/ip6/::1/tcp/4001/p2p/" + id,
        "/ip4/127.0.0.1/tcp/4001/ipfs/" + id,
        "/ip4/127.0.0.1/tcp/4001/p2p/notapeer",
        "/ip4/127.0.0.1/tcp/4001",
        "ip4/127.0.0.1/tcp/4001/p2p/" + id,
        "/ip4/127.0.0.1/tcp/4001/p2p/" + id + "/",
        "",
    };
    for (const auto& text : bad) {
      CAPTURE(text);
      CHECK(multiaddr_error(text) == ErrorCode::MalformedMultiaddr);
    }
  }
}
