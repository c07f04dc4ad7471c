#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>

#include "farmledger/bytes.hpp"

namespace testing {

/// Independent decoder: zxing-cpp (python binding) on the rendered PNG.
inline std::optional<std::string> decode_qr_png(farmledger::ByteView png) {
  namespace fs = std::filesystem;
  std::random_device rd;
  const auto path = fs::temp_directory_path() / ("qr-" + std::to_string(rd()) + ".png");
  {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
  }
  const std::string cmd = "python3 '" FARMLEDGER_QR_DECODER "' '" + path.string() + "'";
  std::string text;
  int status = -1;
  if (FILE* pipe = popen(cmd.c_str(), "r")) {
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, n);
    status = pclose(pipe);
  }
  fs::remove(path);
  if (status != 0 || text.empty()) return std::nullopt;
  return text;
}

}  // namespace testing
