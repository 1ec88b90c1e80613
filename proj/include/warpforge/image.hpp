#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "warpforge/error.hpp"

namespace warpforge {

using Rgb = std::array<std::uint8_t, 3>;

/// Row-major 8-bit RGB image.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height

  static Frame black(int width, int height) {
    if (width <= 0 || height <= 0) throw ValidationError("frame dimensions must be positive");
    return {width, height, std::vector<std::uint8_t>(std::size_t(3) * width * height, 0)};
  }

  std::size_t size() const { return std::size_t(width) * height; }

  Rgb at(int u, int v) const {
    const std::size_t i = 3 * (std::size_t(v) * width + u);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }

  void set(int u, int v, const Rgb& c) {
    const std::size_t i = 3 * (std::size_t(v) * width + u);
    pixels[i] = c[0];
    pixels[i + 1] = c[1];
    pixels[i + 2] = c[2];
  }

  bool operator==(const Frame&) const = default;
};

/// Row-major camera-Z depth. A pixel is valid when its depth is finite and > 0; invalid
/// pixels hold exactly 0.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  static DepthFrame invalid(int width, int height) {
    if (width <= 0 || height <= 0) throw ValidationError("depth dimensions must be positive");
    return {width, height, std::vector<float>(std::size_t(width) * height, 0.0f)};
  }

  /// Builds a depth frame, mapping non-finite and non-positive samples to 0.
  static DepthFrame from_values(int width, int height, std::vector<float> values) {
    if (width <= 0 || height <= 0 || values.size() != std::size_t(width) * height) {
      throw DimensionMismatch("depth values do not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    for (float& v : values) {
      if (!(std::isfinite(v) && v > 0.0f)) v = 0.0f;
    }
    return {width, height, std::move(values)};
  }

  std::size_t size() const { return std::size_t(width) * height; }
  bool valid(std::size_t i) const { return values[i] > 0.0f; }
  float at(int u, int v) const { return values[std::size_t(v) * width + u]; }

  bool operator==(const DepthFrame&) const = default;
};

/// Row-major binary mask with cells in {0, 1}.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  static Mask zeros(int width, int height) {
    if (width <= 0 || height <= 0) throw ValidationError("mask dimensions must be positive");
    return {width, height, std::vector<std::uint8_t>(std::size_t(width) * height, 0)};
  }

  static Mask ones(int width, int height) {
    Mask m = zeros(width, height);
    std::fill(m.bits.begin(), m.bits.end(), std::uint8_t{1});
    return m;
  }

  std::size_t size() const { return std::size_t(width) * height; }
  std::uint8_t at(int u, int v) const { return bits[std::size_t(v) * width + u]; }
  void set(int u, int v, std::uint8_t b) { bits[std::size_t(v) * width + u] = b; }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
  }

  Mask inverted() const {
    Mask m = *this;
    for (std::uint8_t& b : m.bits) b = static_cast<std::uint8_t>(1 - b);
    return m;
  }

  bool operator==(const Mask&) const = default;
};

/// Square dilation of a binary mask by `radius` pixels (Chebyshev distance).
inline Mask dilate(const Mask& m, int radius) {
  if (radius <= 0) return m;
  Mask out = Mask::zeros(m.width, m.height);
  for (int v = 0; v < m.height; ++v) {
    for (int u = 0; u < m.width; ++u) {
      if (!m.at(u, v)) continue;
      for (int dv = -radius; dv <= radius; ++dv) {
        for (int du = -radius; du <= radius; ++du) {
          const int x = u + du, y = v + dv;
          if (x >= 0 && y >= 0 && x < m.width && y < m.height) out.set(x, y, 1);
        }
      }
    }
  }
  return out;
}

}  // namespace warpforge
