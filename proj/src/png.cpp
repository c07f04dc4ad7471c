#include "farmledger/png.hpp"

#include <zlib.h>

#include <stdexcept>

#include "farmledger/errors.hpp"

namespace farmledger {

namespace {

void put_chunk(Bytes& out, const char* type, const Bytes& data) {
  put_u32_be(out, static_cast<std::uint32_t>(data.size()));
  Bytes body(type, type + 4);
  body.insert(body.end(), data.begin(), data.end());
  out.insert(out.end(), body.begin(), body.end());
  put_u32_be(out, static_cast<std::uint32_t>(crc32(0L, body.data(), static_cast<uInt>(body.size()))));
}

}  // namespace

Bytes encode_png_gray(std::uint32_t width, std::uint32_t height, ByteView pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * height) throw Error(ErrorCode::InvalidArgument, "pixel buffer size mismatch");

  Bytes raw;
  raw.reserve((static_cast<std::size_t>(width) + 1) * height);
  for (std::uint32_t y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: none
    auto row = pixels.subspan(static_cast<std::size_t>(y) * width, width);
    raw.insert(raw.end(), row.begin(), row.end());
  }
  uLongf compressed_len = compressBound(static_cast<uLong>(raw.size()));
  Bytes compressed(compressed_len);
  if (compress2(compressed.data(), &compressed_len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw std::runtime_error("zlib compression failed");
  }
  compressed.resize(compressed_len);

  Bytes out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  Bytes ihdr;
  put_u32_be(ihdr, width);
  put_u32_be(ihdr, height);
  ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // depth 8, grayscale, deflate, no filter, no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", {});
  return out;
}

Bytes render_qr_png(const qr::QrCode& code, int scale, int border) {
  const int dim = (code.size() + 2 * border) * scale;
  Bytes pixels(static_cast<std::size_t>(dim) * dim, 0xff);
  for (int y = 0; y < dim; ++y) {
    for (int x = 0; x < dim; ++x) {
      if (code.module(x / scale - border, y / scale - border)) pixels[static_cast<std::size_t>(y) * dim + x] = 0;
    }
  }
  return encode_png_gray(static_cast<std::uint32_t>(dim), static_cast<std::uint32_t>(dim), pixels);
}

}  // namespace farmledger
