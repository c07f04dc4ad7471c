#include "farmledger/cid.hpp"

namespace farmledger {

Digest digest(ByteView data) { return sha256(data); }

Cid cid_from_bytes(ByteView data) { return Cid::from_digest(sha256(data)); }

Cid parse_cid(std::string_view text) { return Cid::parse(text); }

}  // namespace farmledger
