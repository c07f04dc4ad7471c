#pragma once

#include <cstdint>

#include "farmledger/bytes.hpp"
#include "farmledger/qr.hpp"

namespace farmledger {

/// 8-bit grayscale PNG from a row-major pixel buffer.
Bytes encode_png_gray(std::uint32_t width, std::uint32_t height, ByteView pixels);

/// Black-on-white rendering, `scale` pixels per module with a `border`-module quiet zone.
Bytes render_qr_png(const qr::QrCode& code, int scale = 8, int border = 4);

}  // namespace farmledger
