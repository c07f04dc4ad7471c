#include <doctest.h>

#include <opencv2/imgcodecs.hpp>

#include "farmledger/errors.hpp"
#include "farmledger/png.hpp"
#include "farmledger/qr.hpp"
#include "qr_decode.hpp"
#include "support.hpp"

using namespace farmledger;
using qr::Ecc;
using qr::QrCode;

TEST_SUITE("qr") {
  TEST_CASE("data capacity table") {
    CHECK(qr::data_codewords(1, Ecc::Low) == 19);
    CHECK(qr::data_codewords(1, Ecc::Medium) == 16);
    CHECK(qr::data_codewords(1, Ecc::Quartile) == 13);
    CHECK(qr::data_codewords(1, Ecc::High) == 9);
    CHECK(qr::data_codewords(5, Ecc::Medium) == 86);
    CHECK(qr::data_codewords(10, Ecc::Medium) == 216);
    CHECK(qr::data_codewords(40, Ecc::Low) == 2956);
    CHECK(qr::data_codewords(40, Ecc::High) == 1276);
  }

  TEST_CASE("smallest fitting version is chosen") {
    // Byte mode, version 1-M: 4 mode bits + 8 count bits + 8n ≤ 128.
    CHECK(QrCode::encode_text(std::string(14, 'a')).version() == 1);
    CHECK(QrCode::encode_text(std::string(15, 'a')).version() == 2);
    const auto code = QrCode::encode_text("hello");
    CHECK(code.size() == 21);
    CHECK(code.ecc() == Ecc::Medium);
    CHECK(code.mask() >= 0);
    CHECK(code.mask() < 8);
    CHECK(QrCode::encode_text(std::string(2953, 'x'), Ecc::Low).version() == 40);
    CHECK_THROWS_AS(QrCode::encode_text(std::string(2954, 'x'), Ecc::Low), Error);
    CHECK(QrCode::encode_text(std::string(2331, 'x')).version() == 40);
  }

  TEST_CASE("finder patterns sit in three corners") {
    const auto code = QrCode::encode_text("finder");
    const int n = code.size();
    for (auto [ox, oy] : {std::pair{0, 0}, std::pair{n - 7, 0}, std::pair{0, n - 7}}) {
      for (int d = 0; d < 7; ++d) {
        CHECK(code.module(ox + d, oy));
        CHECK(code.module(ox + d, oy + 6));
        CHECK(code.module(ox, oy + d));
        CHECK(code.module(ox + 6, oy + d));
      }
      CHECK(code.module(ox + 3, oy + 3));
      CHECK_FALSE(code.module(ox + 1, oy + 1));
    }
    CHECK(code.module(8, n - 8));  // dark module
    CHECK_FALSE(code.module(-1, 0));
    CHECK_FALSE(code.module(n, 0));
  }

  TEST_CASE("symbols decode with an independent reader") {
    std::mt19937_64 rng(12);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789:/?=.-_";
    std::vector<std::string> texts = {"a", "http://127.0.0.1:5173/visualize?cid=Qmc9jWMHCLVdETJXMjnvN4FiXhXd2tVbe4fBVe6dBLJAYJ"};
    for (std::size_t len : {10, 40, 100, 200, 300, 500}) {
      std::string s;
      for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
      texts.push_back(s);
    }
    for (const auto& t : texts) {
      for (auto ecc : {Ecc::Low, Ecc::Medium, Ecc::Quartile, Ecc::High}) {
        CAPTURE(t.size());
        CAPTURE(static_cast<int>(ecc));
        if (t.size() > 300 && ecc == Ecc::High) continue;
        const auto code = QrCode::encode_text(t, ecc);
        CHECK(testing::decode_qr_png(render_qr_png(code, 4, 4)) == t);
      }
    }
  }
}

TEST_SUITE("png") {
  TEST_CASE("grayscale png decodes to the same pixels") {
    std::vector<std::uint8_t> pixels(7 * 3);
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = static_cast<std::uint8_t>(i * 11);
    const auto png = encode_png_gray(7, 3, pixels);
    CHECK(Bytes(png.begin(), png.begin() + 8) == Bytes{0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a});
    std::vector<std::uint8_t> buf(png.begin(), png.end());
    const auto img = cv::imdecode(buf, cv::IMREAD_UNCHANGED);
    REQUIRE(img.cols == 7);
    REQUIRE(img.rows == 3);
    CHECK(img.channels() == 1);
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 7; ++x) CHECK(img.at<std::uint8_t>(y, x) == pixels[static_cast<std::size_t>(y * 7 + x)]);
    }
    CHECK_THROWS_AS(encode_png_gray(7, 3, Bytes(20)), Error);
  }

  TEST_CASE("qr rendering dimensions and quiet zone") {
    const auto code = QrCode::encode_text("dims");
    const auto png = render_qr_png(code, 8, 4);
    std::vector<std::uint8_t> buf(png.begin(), png.end());
    const auto img = cv::imdecode(buf, cv::IMREAD_GRAYSCALE);
    const int side = (code.size() + 8) * 8;
    REQUIRE(img.cols == side);
    REQUIRE(img.rows == side);
    CHECK(img.at<std::uint8_t>(0, 0) == 255);
    CHECK(img.at<std::uint8_t>(32, 32) == 0);
  }
}
