#include "physica/png_io.hpp"

#include "physica/errors.hpp"
#include "physica/rng.hpp"

#include <doctest.h>

#include <string>

using namespace physica;

namespace {

ImageRgb8 random_image(SplitMix64& rng, int w, int h) {
  ImageRgb8 img(w, h);
  for (auto& b : img.data) b = static_cast<std::uint8_t>(rng.next_below(256));
  return img;
}

}  // namespace

TEST_CASE("encode/decode round-trips random images") {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 8 * static_cast<int>(1 + rng.next_below(8));
    const int h = 8 * static_cast<int>(1 + rng.next_below(8));
    const ImageRgb8 img = random_image(rng, w, h);
    const ImageRgb8 back = decode_png(encode_png(img));
    CHECK(back == img);
  }
}

TEST_CASE("encoding is deterministic") {
  SplitMix64 rng(2);
  const ImageRgb8 img = random_image(rng, 64, 32);
  CHECK(encode_png(img) == encode_png(img));
}

TEST_CASE("tEXt chunks are embedded before the image data") {
  ImageRgb8 img(8, 8);
  const auto bytes = encode_png(img, {{"legend", "car=#E63C3C"}});
  const std::string as_str(bytes.begin(), bytes.end());
  const auto text_pos = as_str.find("legend");
  const auto idat_pos = as_str.find("IDAT");
  REQUIRE(text_pos != std::string::npos);
  REQUIRE(idat_pos != std::string::npos);
  CHECK(text_pos < idat_pos);
  CHECK(as_str.find("car=#E63C3C") != std::string::npos);
  CHECK(decode_png(bytes) == img);
}

TEST_CASE("decoder rejects non-PNG input") {
  CHECK_THROWS_AS(decode_png({1, 2, 3, 4}), IoError);
  std::vector<std::uint8_t> bytes = encode_png(ImageRgb8(8, 8));
  bytes.resize(bytes.size() / 2);
  CHECK_THROWS_AS(decode_png(bytes), IoError);
}

TEST_CASE("gradient images survive the round trip") {
  ImageRgb8 grad(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      grad.set(x, y, {static_cast<std::uint8_t>(x * 16), static_cast<std::uint8_t>(y * 16),
                      static_cast<std::uint8_t>((x + y) * 8)});
  CHECK(decode_png(encode_png(grad)) == grad);
}

TEST_CASE("decoder reads an externally produced PNG with predictive filters") {
  // 32x32 gradient written by Pillow, which picks Sub/Up/Average/Paeth
  // filters per row; pixel (x, y) = (8x, 8y, (x+y) mod 256).
  const ImageRgb8 img = read_png_file(std::string(PHYSICA_SOURCE_DIR) +
                                      "/tests/fixtures/external_gradient.png");
  REQUIRE(img.width == 32);
  REQUIRE(img.height == 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      const Rgb8 px = img.get(x, y);
      REQUIRE(px.r == static_cast<std::uint8_t>(8 * x));
      REQUIRE(px.g == static_cast<std::uint8_t>(8 * y));
      REQUIRE(px.b == static_cast<std::uint8_t>((x + y) % 256));
    }
}
