#include <doctest.h>

#include "../oracles/ref_codecs.hpp"
#include "farmledger/encoding.hpp"
#include "farmledger/errors.hpp"
#include "support.hpp"

using namespace farmledger;

TEST_SUITE("encoding") {
  TEST_CASE("base58 matches the big-integer oracle") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
      auto data = testing::random_bytes(rng, rng() % 48);
      // Exercise leading-zero handling.
      if (i % 5 == 0 && !data.empty()) data[0] = 0;
      if (i % 10 == 0 && data.size() > 1) data[1] = 0;
      const auto text = base58_encode(data);
      CHECK(text == oracle::base58(testing::vec(data)));
      CHECK(base58_decode(text) == data);
    }
  }

  TEST_CASE("base58 edge cases") {
    CHECK(base58_encode({}) == "");
    CHECK(base58_decode("").empty());
    CHECK(base58_encode(Bytes{0, 0, 0}) == "111");
    CHECK(base58_decode("111") == Bytes{0, 0, 0});
    CHECK(base58_encode(to_bytes("hello world")) == "StV1DL6CwTryKyV");
    for (const char* bad : {"0", "O", "I", "l", "+", " "}) {
      CHECK_THROWS_AS(base58_decode(std::string("Qm") + bad), Error);
      try {
        base58_decode(std::string("Qm") + bad);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidCharacter);
      }
    }
  }

  TEST_CASE("base64url matches the bit-string oracle and rejects non-canonical text") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
      const auto data = testing::random_bytes(rng, rng() % 70);
      const auto text = base64url_encode(data);
      CHECK(text == oracle::base64url(testing::vec(data)));
      CHECK(base64url_decode(text) == data);
    }
    CHECK(base64url_encode(to_bytes("f")) == "Zg");
    CHECK_THROWS_AS(base64url_decode("Zh"), Error);  // non-zero trailing bits
    CHECK_THROWS_AS(base64url_decode("Zg=="), Error);
    CHECK_THROWS_AS(base64url_decode("A"), Error);
    CHECK_THROWS_AS(base64url_decode("a+b/"), Error);
  }

  TEST_CASE("padded base64 round-trips") {
    CHECK(base64_encode(to_bytes("fo")) == "Zm8=");
    CHECK(base64_decode("Zm8=") == to_bytes("fo"));
    CHECK(base64_decode("+/8=") == Bytes{0xfb, 0xff});
    CHECK_THROWS_AS(base64_decode("Zm8"), Error);
    CHECK_THROWS_AS(base64_decode("-_8="), Error);
  }

  TEST_CASE("hex") {
    CHECK(hex_encode(Bytes{0x00, 0xab, 0xff}) == "00abff");
    CHECK(hex_decode("00ABff") == Bytes{0x00, 0xab, 0xff});
    CHECK_THROWS_AS(hex_decode("abc"), Error);
    CHECK_THROWS_AS(hex_decode("zz"), Error);
  }
}
