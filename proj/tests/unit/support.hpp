#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "farmledger/bytes.hpp"

namespace testing {

inline farmledger::Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  farmledger::Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

inline std::vector<std::uint8_t> vec(farmledger::ByteView b) { return {b.begin(), b.end()}; }

/// A fresh directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("farmledger-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
