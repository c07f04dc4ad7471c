#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <string_view>

#include "farmledger/bytes.hpp"
#include "farmledger/crypto.hpp"
#include "farmledger/encoding.hpp"
#include "farmledger/errors.hpp"

namespace farmledger {

inline constexpr std::uint8_t kSha256Code = 0x12;
inline constexpr std::uint8_t kSha256Length = 0x20;
inline constexpr std::size_t kMultihashSize = 34;
inline constexpr std::size_t kMultihashTextSize = 46;

using RawMultihash = std::array<std::uint8_t, kMultihashSize>;

/// sha2-256 multihash (0x12 0x20 <digest>) rendered as base58btc.
///
/// `Tag` keeps content identifiers and peer identifiers apart at the type
/// level even though they share one encoding.
template <class Tag>
class Multihash {
 public:
  Multihash() = default;

  static Multihash from_digest(const Digest& digest) {
    Multihash m;
    m.digest_ = digest;
    return m;
  }

  static Multihash from_raw(ByteView raw) {
    if (raw.size() != kMultihashSize) {
      throw Error(ErrorCode::InvalidLength,
                  "multihash must be 34 bytes, got " + std::to_string(raw.size()));
    }
    if (raw[0] != kSha256Code || raw[1] != kSha256Length) {
      throw Error(ErrorCode::InvalidPrefix, "multihash prefix is not sha2-256/32");
    }
    Multihash m;
    std::memcpy(m.digest_.data(), raw.data() + 2, m.digest_.size());
    return m;
  }

  static Multihash parse(std::string_view text) { return from_raw(base58_decode(text)); }

  const Digest& digest() const { return digest_; }

  RawMultihash raw() const {
    RawMultihash out{};
    out[0] = kSha256Code;
    out[1] = kSha256Length;
    std::memcpy(out.data() + 2, digest_.data(), digest_.size());
    return out;
  }

  std::string text() const {
    const auto r = raw();
    return base58_encode(r);
  }

  auto operator<=>(const Multihash&) const = default;

 private:
  Digest digest_{};
};

}  // namespace farmledger

template <class Tag>
struct std::hash<farmledger::Multihash<Tag>> {
  std::size_t operator()(const farmledger::Multihash<Tag>& m) const noexcept {
    std::size_t h;
    std::memcpy(&h, m.digest().data(), sizeof h);
    return h;
  }
};
