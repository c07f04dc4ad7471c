#pragma once

#include <string>
#include <string_view>

#include "farmledger/multihash.hpp"

namespace farmledger {

struct CidTag {};

/// CIDv0: base58btc sha2-256 multihash, always 46 characters starting "Qm".
using Cid = Multihash<CidTag>;

inline constexpr int kCidVersion = 0;

Digest digest(ByteView data);

Cid cid_from_bytes(ByteView data);

/// Errors: InvalidCharacter, InvalidLength (decoded size != 34),
/// InvalidPrefix (first bytes != 0x12 0x20).
Cid parse_cid(std::string_view text);

inline std::string render(const Cid& cid) { return cid.text(); }

}  // namespace farmledger
