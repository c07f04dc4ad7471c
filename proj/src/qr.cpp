#include "farmledger/qr.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "farmledger/errors.hpp"

namespace farmledger::qr {

namespace {

// Indexed [level][version]; column 0 unused.
constexpr std::int8_t kEccPerBlock[4][41] = {
    {-1, 7,  10, 15, 20, 26, 18, 20, 24, 30, 18, 20, 24, 26, 30, 22, 24, 28, 30, 28, 28,
     28, 28, 30, 30, 26, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30},
    {-1, 10, 16, 26, 18, 24, 16, 18, 22, 22, 26, 30, 22, 22, 24, 24, 28, 28, 26, 26, 26,
     26, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28},
    {-1, 13, 22, 18, 26, 18, 24, 18, 22, 20, 24, 28, 26, 24, 20, 30, 24, 28, 28, 26, 30,
     28, 30, 30, 30, 30, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30},
    {-1, 17, 28, 22, 16, 22, 28, 26, 26, 24, 28, 24, 28, 22, 24, 24, 30, 28, 28, 26, 28,
     30, 24, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30},
};

constexpr std::int8_t kNumBlocks[4][41] = {
    {-1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 4, 4, 4, 4, 4, 6, 6, 6, 6, 7, 8,
     8, 9, 9, 10, 12, 12, 12, 13, 14, 15, 16, 17, 18, 19, 19, 20, 21, 22, 24, 25},
    {-1, 1, 1, 1, 2, 2, 4, 4, 4, 5, 5, 5, 8, 9, 9, 10, 10, 11, 13, 14, 16,
     17, 17, 18, 20, 21, 23, 25, 26, 28, 29, 31, 33, 35, 37, 38, 40, 43, 45, 47, 49},
    {-1, 1, 1, 2, 2, 4, 4, 6, 6, 8, 8, 8, 10, 12, 16, 12, 17, 16, 18, 21, 20,
     23, 23, 25, 27, 29, 34, 34, 35, 38, 40, 43, 45, 48, 51, 53, 56, 59, 62, 65, 68},
    {-1, 1, 1, 2, 4, 4, 4, 5, 6, 8, 8, 11, 11, 16, 16, 18, 16, 19, 21, 25, 25,
     25, 34, 30, 32, 35, 37, 40, 42, 45, 48, 51, 54, 57, 60, 63, 66, 70, 74, 77, 81},
};

int level_index(Ecc e) { return static_cast<int>(e); }

// Format-information level bits: L=01, M=00, Q=11, H=10.
int level_format_bits(Ecc e) {
  switch (e) {
    case Ecc::Low: return 1;
    case Ecc::Medium: return 0;
    case Ecc::Quartile: return 3;
    case Ecc::High: return 2;
  }
  return 0;
}

int raw_data_modules(int version) {
  int result = (16 * version + 128) * version + 64;
  if (version >= 2) {
    const int num_align = version / 7 + 2;
    result -= (25 * num_align - 10) * num_align - 55;
    if (version >= 7) result -= 36;
  }
  return result;
}

std::vector<int> alignment_positions(int version) {
  if (version == 1) return {};
  const int num_align = version / 7 + 2;
  const int size = version * 4 + 17;
  const int step = (version * 8 + num_align * 3 + 5) / (num_align * 4 - 4) * 2;
  std::vector<int> out(static_cast<std::size_t>(num_align));
  out[0] = 6;
  for (int i = num_align - 1, pos = size - 7; i >= 1; --i, pos -= step) out[static_cast<std::size_t>(i)] = pos;
  return out;
}

bool bit_at(long value, int i) { return ((value >> i) & 1) != 0; }

std::uint8_t gf_mul(std::uint8_t x, std::uint8_t y) {
  int z = 0;
  for (int i = 7; i >= 0; --i) {
    z = (z << 1) ^ ((z >> 7) * 0x11d);
    z ^= ((y >> i) & 1) * x;
  }
  return static_cast<std::uint8_t>(z);
}

Bytes rs_divisor(int degree) {
  Bytes result(static_cast<std::size_t>(degree), 0);
  result.back() = 1;
  std::uint8_t root = 1;
  for (int i = 0; i < degree; ++i) {
    for (std::size_t j = 0; j < result.size(); ++j) {
      result[j] = gf_mul(result[j], root);
      if (j + 1 < result.size()) result[j] ^= result[j + 1];
    }
    root = gf_mul(root, 0x02);
  }
  return result;
}

Bytes rs_remainder(ByteView data, const Bytes& divisor) {
  Bytes result(divisor.size(), 0);
  for (auto b : data) {
    const std::uint8_t factor = b ^ result.front();
    result.erase(result.begin());
    result.push_back(0);
    for (std::size_t i = 0; i < result.size(); ++i) result[i] ^= gf_mul(divisor[i], factor);
  }
  return result;
}

Bytes add_ecc_and_interleave(const Bytes& data, int version, Ecc ecc) {
  const int num_blocks = kNumBlocks[level_index(ecc)][version];
  const int block_ecc = kEccPerBlock[level_index(ecc)][version];
  const int raw_codewords = raw_data_modules(version) / 8;
  const int num_short = num_blocks - raw_codewords % num_blocks;
  const int short_len = raw_codewords / num_blocks;

  const auto divisor = rs_divisor(block_ecc);
  std::vector<Bytes> blocks;
  std::size_t offset = 0;
  for (int i = 0; i < num_blocks; ++i) {
    const auto len = static_cast<std::size_t>(short_len - block_ecc + (i < num_short ? 0 : 1));
    Bytes block(data.begin() + static_cast<std::ptrdiff_t>(offset),
                data.begin() + static_cast<std::ptrdiff_t>(offset + len));
    offset += len;
    const auto ecc_bytes = rs_remainder(block, divisor);
    if (i < num_short) block.push_back(0);  // placeholder so all blocks align
    block.insert(block.end(), ecc_bytes.begin(), ecc_bytes.end());
    blocks.push_back(std::move(block));
  }

  Bytes out;
  for (std::size_t i = 0; i < blocks.front().size(); ++i) {
    for (int j = 0; j < num_blocks; ++j) {
      if (i != static_cast<std::size_t>(short_len - block_ecc) || j >= num_short) out.push_back(blocks[static_cast<std::size_t>(j)][i]);
    }
  }
  return out;
}

}  // namespace

int data_codewords(int version, Ecc ecc) {
  return raw_data_modules(version) / 8 - kEccPerBlock[level_index(ecc)][version] * kNumBlocks[level_index(ecc)][version];
}

QrCode QrCode::encode_bytes(ByteView data, Ecc ecc) {
  int version = 0;
  for (int v = 1; v <= 40; ++v) {
    const int count_bits = v <= 9 ? 8 : 16;
    const long needed = 4L + count_bits + 8L * static_cast<long>(data.size());
    if (data.size() < (std::size_t{1} << count_bits) && needed <= data_codewords(v, ecc) * 8L) {
      version = v;
      break;
    }
  }
  if (version == 0) throw Error(ErrorCode::TooLarge, "payload too large for a QR symbol");

  std::vector<bool> bits;
  auto append = [&](std::uint32_t value, int n) {
    for (int i = n - 1; i >= 0; --i) bits.push_back(((value >> i) & 1) != 0);
  };
  append(0x4, 4);  // byte mode
  append(static_cast<std::uint32_t>(data.size()), version <= 9 ? 8 : 16);
  for (auto b : data) append(b, 8);

  const auto capacity = static_cast<std::size_t>(data_codewords(version, ecc)) * 8;
  append(0, static_cast<int>(std::min<std::size_t>(4, capacity - bits.size())));
  append(0, static_cast<int>((8 - bits.size() % 8) % 8));
  for (std::uint8_t pad = 0xec; bits.size() < capacity; pad ^= 0xec ^ 0x11) append(pad, 8);

  Bytes codewords(bits.size() / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) codewords[i >> 3] |= static_cast<std::uint8_t>(1 << (7 - (i & 7)));
  }
  return QrCode(version, ecc, add_ecc_and_interleave(codewords, version, ecc), -1);
}

QrCode::QrCode(int version, Ecc ecc, const Bytes& codewords, int mask)
    : version_(version),
      size_(version * 4 + 17),
      ecc_(ecc),
      modules_(static_cast<std::size_t>(size_ * size_), false),
      is_function_(static_cast<std::size_t>(size_ * size_), false) {
  draw_function_patterns();
  draw_codewords(codewords);

  if (mask < 0) {
    long best = std::numeric_limits<long>::max();
    for (int m = 0; m < 8; ++m) {
      apply_mask(m);
      draw_format_bits(m);
      const long p = penalty();
      if (p < best) {
        best = p;
        mask = m;
      }
      apply_mask(m);  // xor undoes it
    }
  }
  mask_ = mask;
  apply_mask(mask);
  draw_format_bits(mask);
}

bool QrCode::module(int x, int y) const {
  if (x < 0 || y < 0 || x >= size_ || y >= size_) return false;
  return modules_[static_cast<std::size_t>(y * size_ + x)];
}

void QrCode::set_function(int x, int y, bool dark) {
  const auto i = static_cast<std::size_t>(y * size_ + x);
  modules_[i] = dark;
  is_function_[i] = true;
}

void QrCode::draw_finder(int cx, int cy) {
  for (int dy = -4; dy <= 4; ++dy) {
    for (int dx = -4; dx <= 4; ++dx) {
      const int dist = std::max(std::abs(dx), std::abs(dy));
      const int x = cx + dx;
      const int y = cy + dy;
      if (x >= 0 && x < size_ && y >= 0 && y < size_) set_function(x, y, dist != 2 && dist != 4);
    }
  }
}

void QrCode::draw_alignment(int cx, int cy) {
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) set_function(cx + dx, cy + dy, std::max(std::abs(dx), std::abs(dy)) != 1);
  }
}

void QrCode::draw_function_patterns() {
  for (int i = 0; i < size_; ++i) {
    set_function(6, i, i % 2 == 0);
    set_function(i, 6, i % 2 == 0);
  }
  draw_finder(3, 3);
  draw_finder(size_ - 4, 3);
  draw_finder(3, size_ - 4);

  const auto positions = alignment_positions(version_);
  const auto n = positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool corner = (i == 0 && j == 0) || (i == 0 && j == n - 1) || (i == n - 1 && j == 0);
      if (!corner) draw_alignment(positions[i], positions[j]);
    }
  }
  draw_format_bits(0);  // reserve the area
  draw_version();
}

void QrCode::draw_format_bits(int mask) {
  const int data = level_format_bits(ecc_) << 3 | mask;
  int rem = data;
  for (int i = 0; i < 10; ++i) rem = (rem << 1) ^ ((rem >> 9) * 0x537);
  const int bits = (data << 10 | rem) ^ 0x5412;

  for (int i = 0; i <= 5; ++i) set_function(8, i, bit_at(bits, i));
  set_function(8, 7, bit_at(bits, 6));
  set_function(8, 8, bit_at(bits, 7));
  set_function(7, 8, bit_at(bits, 8));
  for (int i = 9; i < 15; ++i) set_function(14 - i, 8, bit_at(bits, i));

  for (int i = 0; i < 8; ++i) set_function(size_ - 1 - i, 8, bit_at(bits, i));
  for (int i = 8; i < 15; ++i) set_function(8, size_ - 15 + i, bit_at(bits, i));
  set_function(8, size_ - 8, true);  // dark module
}

void QrCode::draw_version() {
  if (version_ < 7) return;
  int rem = version_;
  for (int i = 0; i < 12; ++i) rem = (rem << 1) ^ ((rem >> 11) * 0x1f25);
  const long bits = static_cast<long>(version_) << 12 | rem;
  for (int i = 0; i < 18; ++i) {
    const bool dark = bit_at(bits, i);
    const int a = size_ - 11 + i % 3;
    const int b = i / 3;
    set_function(a, b, dark);
    set_function(b, a, dark);
  }
}

void QrCode::draw_codewords(const Bytes& codewords) {
  std::size_t i = 0;
  const std::size_t total_bits = codewords.size() * 8;
  for (int right = size_ - 1; right >= 1; right -= 2) {
    if (right == 6) right = 5;  // skip the vertical timing column
    for (int vert = 0; vert < size_; ++vert) {
      for (int j = 0; j < 2; ++j) {
        const int x = right - j;
        const bool upward = ((right + 1) & 2) == 0;
        const int y = upward ? size_ - 1 - vert : vert;
        const auto idx = static_cast<std::size_t>(y * size_ + x);
        if (!is_function_[idx] && i < total_bits) {
          modules_[idx] = bit_at(codewords[i >> 3], 7 - static_cast<int>(i & 7));
          ++i;
        }
      }
    }
  }
}

void QrCode::apply_mask(int mask) {
  for (int y = 0; y < size_; ++y) {
    for (int x = 0; x < size_; ++x) {
      bool invert = false;
      switch (mask) {
        case 0: invert = (x + y) % 2 == 0; break;
        case 1: invert = y % 2 == 0; break;
        case 2: invert = x % 3 == 0; break;
        case 3: invert = (x + y) % 3 == 0; break;
        case 4: invert = (x / 3 + y / 2) % 2 == 0; break;
        case 5: invert = x * y % 2 + x * y % 3 == 0; break;
        case 6: invert = (x * y % 2 + x * y % 3) % 2 == 0; break;
        case 7: invert = ((x + y) % 2 + x * y % 3) % 2 == 0; break;
        default: throw Error(ErrorCode::InvalidArgument, "mask out of range");
      }
      const auto idx = static_cast<std::size_t>(y * size_ + x);
      if (!is_function_[idx] && invert) modules_[idx] = !modules_[idx];
    }
  }
}

long QrCode::penalty() const {
  long result = 0;
  auto at = [&](int x, int y) { return module(x, y); };

  // Runs of five or more, and finder-like 1:1:3:1:1 patterns with a light margin.
  static constexpr bool kFinderA[11] = {true, false, true, true, true, false, true, false, false, false, false};
  static constexpr bool kFinderB[11] = {false, false, false, false, true, false, true, true, true, false, true};
  for (int pass = 0; pass < 2; ++pass) {
    for (int a = 0; a < size_; ++a) {
      int run = 1;
      for (int b = 1; b <= size_; ++b) {
        const bool same = b < size_ && (pass == 0 ? at(b, a) == at(b - 1, a) : at(a, b) == at(a, b - 1));
        if (same) {
          ++run;
        } else {
          if (run >= 5) result += 3 + (run - 5);
          run = 1;
        }
      }
      for (int b = 0; b + 11 <= size_; ++b) {
        bool match_a = true;
        bool match_b = true;
        for (int k = 0; k < 11; ++k) {
          const bool v = pass == 0 ? at(b + k, a) : at(a, b + k);
          match_a = match_a && v == kFinderA[k];
          match_b = match_b && v == kFinderB[k];
        }
        if (match_a) result += 40;
        if (match_b) result += 40;
      }
    }
  }

  for (int y = 0; y + 1 < size_; ++y) {
    for (int x = 0; x + 1 < size_; ++x) {
      const bool c = at(x, y);
      if (c == at(x + 1, y) && c == at(x, y + 1) && c == at(x + 1, y + 1)) result += 3;
    }
  }

  long dark = 0;
  for (bool m : modules_) dark += m ? 1 : 0;
  const long total = static_cast<long>(size_) * size_;
  const long k = (std::abs(dark * 20 - total * 10) + total - 1) / total - 1;
  result += k * 10;
  return result;
}

}  // namespace farmledger::qr
