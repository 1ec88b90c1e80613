#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "warpforge/error.hpp"
#include "warpforge/image.hpp"
#include "warpforge/io/png.hpp"

namespace warpforge::io {

namespace fs = std::filesystem;

// Frames: 8-bit RGB PNG.

inline void write_frame(const fs::path& path, const Frame& frame) {
  PngImage img{frame.width, frame.height, 3, 8, {}};
  img.samples.assign(frame.pixels.begin(), frame.pixels.end());
  write_png(path, img);
}

inline Frame read_frame(const fs::path& path) {
  const PngImage img = read_png(path);
  if (img.channels != 3 || img.bit_depth != 8) {
    throw ValidationError(path.string() + ": frames must be 8-bit RGB");
  }
  Frame f{img.width, img.height, std::vector<std::uint8_t>(img.samples.size())};
  for (std::size_t i = 0; i < img.samples.size(); ++i) f.pixels[i] = static_cast<std::uint8_t>(img.samples[i]);
  return f;
}

// Masks: 8-bit gray PNG, 255 = fill region, 0 = keep.

inline void write_mask(const fs::path& path, const Mask& mask) {
  PngImage img{mask.width, mask.height, 1, 8, std::vector<std::uint16_t>(mask.size())};
  for (std::size_t i = 0; i < mask.size(); ++i) img.samples[i] = mask.bits[i] ? 255 : 0;
  write_png(path, img);
}

inline Mask read_mask(const fs::path& path) {
  const PngImage img = read_png(path);
  if (img.channels != 1 || img.bit_depth != 8) {
    throw ValidationError(path.string() + ": masks must be 8-bit grayscale");
  }
  Mask m = Mask::zeros(img.width, img.height);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (img.samples[i] != 0 && img.samples[i] != 255) {
      throw ValidationError(path.string() + ": mask values must be 0 or 255");
    }
    m.bits[i] = img.samples[i] ? 1 : 0;
  }
  return m;
}

// Depth "DPT1": 'D','P','T','1', u32le width, u32le height, width*height f32le row-major.

inline constexpr char kDepthMagic[4] = {'D', 'P', 'T', '1'};

inline void write_depth_dpt1(const fs::path& path, const DepthFrame& depth) {
  std::vector<char> buf(12 + 4 * depth.size());
  std::memcpy(buf.data(), kDepthMagic, 4);
  auto put_u32 = [&](std::size_t at, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) buf[at + b] = static_cast<char>((v >> (8 * b)) & 0xff);
  };
  put_u32(4, static_cast<std::uint32_t>(depth.width));
  put_u32(8, static_cast<std::uint32_t>(depth.height));
  for (std::size_t i = 0; i < depth.size(); ++i) put_u32(12 + 4 * i, std::bit_cast<std::uint32_t>(depth.values[i]));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::vector<unsigned char> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw MissingFile("missing file " + path.string());
    throw IoError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Rejects negative or non-finite samples instead of zeroing them.
inline void check_depth_values(const fs::path& path, const std::vector<float>& values) {
  for (float v : values) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw ValidationError(path.string() + ": depth samples must be finite and >= 0");
    }
  }
}

inline DepthFrame read_depth_dpt1(const fs::path& path) {
  const std::vector<unsigned char> buf = read_all(path);
  if (buf.size() < 4 || std::memcmp(buf.data(), kDepthMagic, 4) != 0) {
    throw BadMagic(path.string() + ": expected DPT1 depth file");
  }
  if (buf.size() < 12) throw ValidationError(path.string() + ": truncated DPT1 header");
  auto get_u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t(buf[at + b]) << (8 * b);
    return v;
  };
  const std::uint32_t w = get_u32(4), h = get_u32(8);
  if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) {
    throw ValidationError(path.string() + ": bad DPT1 dimensions");
  }
  const std::size_t n = std::size_t(w) * h;
  if (buf.size() != 12 + 4 * n) {
    throw ValidationError(path.string() + ": DPT1 payload is " + std::to_string(buf.size() - 12) + " bytes, expected " +
                          std::to_string(4 * n));
  }
  DepthFrame d{int(w), int(h), std::vector<float>(n)};
  for (std::size_t i = 0; i < n; ++i) d.values[i] = std::bit_cast<float>(get_u32(12 + 4 * i));
  check_depth_values(path, d.values);
  return d;
}

// Depth as 16-bit gray PNG: depth = raw * scale + offset, raw 0 = invalid.

struct Png16DepthCoding {
  double scale = 1e-3;
  double offset = 0.0;
};

inline void write_depth_png16(const fs::path& path, const DepthFrame& depth, const Png16DepthCoding& coding) {
  if (!(coding.scale > 0.0)) throw ValidationError("png16 depth scale must be positive");
  PngImage img{depth.width, depth.height, 1, 16, std::vector<std::uint16_t>(depth.size())};
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.valid(i)) continue;
    const double raw = std::round((double(depth.values[i]) - coding.offset) / coding.scale);
    img.samples[i] = static_cast<std::uint16_t>(std::clamp(raw, 1.0, 65535.0));
  }
  write_png(path, img);
}

inline DepthFrame read_depth_png16(const fs::path& path, const Png16DepthCoding& coding) {
  const PngImage img = read_png(path);
  if (img.channels != 1 || img.bit_depth != 16) {
    throw ValidationError(path.string() + ": png16 depth must be 16-bit grayscale");
  }
  DepthFrame d{img.width, img.height, std::vector<float>(img.samples.size(), 0.0f)};
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    if (img.samples[i] != 0) d.values[i] = static_cast<float>(img.samples[i] * coding.scale + coding.offset);
  }
  check_depth_values(path, d.values);
  return d;
}

/// Zero-padded sequence file name, e.g. numbered_name("f_", 3, ".png") == "f_00003.png".
inline std::string numbered_name(const std::string& prefix, std::size_t index, const std::string& ext) {
  std::string digits = std::to_string(index);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return prefix + digits + ext;
}

}  // namespace warpforge::io
