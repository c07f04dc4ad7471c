#pragma once

#include <string>
#include <string_view>

#include "farmledger/bytes.hpp"

namespace farmledger {

// Bitcoin alphabet. Leading zero bytes map to leading '1's.
std::string base58_encode(ByteView data);
// Throws Error(InvalidCharacter) on a symbol outside the alphabet.
Bytes base58_decode(std::string_view text);

// Unpadded URL-safe base64.
std::string base64url_encode(ByteView data);
// Strict: rejects padding, foreign symbols, impossible lengths and non-zero
// trailing bits, so every byte string has exactly one accepted encoding.
Bytes base64url_decode(std::string_view text);

std::string base64_encode(ByteView data);
Bytes base64_decode(std::string_view text);

std::string hex_encode(ByteView data);
Bytes hex_decode(std::string_view text);

}  // namespace farmledger
