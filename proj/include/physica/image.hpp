#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace physica {

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

/// Row-major H x W x 3 byte image, origin top-left.
struct ImageRgb8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  ImageRgb8() = default;
  ImageRgb8(int w, int h)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* px(int x, int y) {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const std::uint8_t* px(int x, int y) const {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  void set(int x, int y, Rgb8 c) {
    auto* p = px(x, y);
    p[0] = c.r; p[1] = c.g; p[2] = c.b;
  }
  Rgb8 get(int x, int y) const {
    const auto* p = px(x, y);
    return {p[0], p[1], p[2]};
  }

  bool operator==(const ImageRgb8&) const = default;
};

inline std::uint8_t round_half_up_u8(double x) {
  const double r = std::floor(x + 0.5);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

}  // namespace physica
