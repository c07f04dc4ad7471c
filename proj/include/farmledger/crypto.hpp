#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "farmledger/bytes.hpp"

namespace farmledger {

/// 32-byte SHA-256 output.
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);
Digest hmac_sha256(ByteView key, ByteView data);

/// Incremental SHA-256. Copyable so a running hash can be snapshotted.
class Sha256 {
 public:
  Sha256();
  Sha256(const Sha256& other);
  Sha256& operator=(const Sha256& other);
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;
  ~Sha256();

  void update(ByteView data);
  Digest finish() const;

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

Bytes random_bytes(std::size_t n);

bool constant_time_equal(ByteView a, ByteView b);

}  // namespace farmledger
