#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "farmledger/bytes.hpp"

namespace farmledger::qr {

enum class Ecc { Low, Medium, Quartile, High };

/// A QR Code Model 2 symbol, byte-mode encoded.
class QrCode {
 public:
  /// Smallest version (1..40) that fits; mask chosen by the standard penalty
  /// rules. Throws Error(TooLarge) if nothing fits.
  static QrCode encode_bytes(ByteView data, Ecc ecc = Ecc::Medium);
  static QrCode encode_text(std::string_view text, Ecc ecc = Ecc::Medium) { return encode_bytes(as_bytes(text), ecc); }

  int version() const { return version_; }
  int size() const { return size_; }
  int mask() const { return mask_; }
  Ecc ecc() const { return ecc_; }

  /// True for a dark module. Coordinates outside the symbol read as light.
  bool module(int x, int y) const;

 private:
  QrCode(int version, Ecc ecc, const Bytes& codewords, int mask);

  void draw_function_patterns();
  void draw_format_bits(int mask);
  void draw_version();
  void draw_finder(int x, int y);
  void draw_alignment(int x, int y);
  void set_function(int x, int y, bool dark);
  void draw_codewords(const Bytes& codewords);
  void apply_mask(int mask);
  long penalty() const;

  int version_;
  int size_;
  Ecc ecc_;
  int mask_ = 0;
  std::vector<bool> modules_;
  std::vector<bool> is_function_;
};

/// Usable data codewords for a version / level.
int data_codewords(int version, Ecc ecc);

}  // namespace farmledger::qr
