#pragma once

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "warpforge/error.hpp"

namespace warpforge::io {

/// Decoded PNG samples. 16-bit images keep native values; 8-bit values are widened.
struct PngImage {
  int width = 0;
  int height = 0;
  int channels = 0;   // 1 (gray) or 3 (RGB)
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint16_t> samples;
};

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline void png_warning_silent(png_structp, png_const_charp) {}

}  // namespace detail

/// Writes an 8-bit (gray or RGB) or 16-bit gray PNG. Output bytes depend only on the
/// pixel data.
inline void write_png(const std::filesystem::path& path, const PngImage& img) {
  const bool ok_format = (img.bit_depth == 8 && (img.channels == 1 || img.channels == 3)) ||
                         (img.bit_depth == 16 && img.channels == 1);
  if (!ok_format || img.width <= 0 || img.height <= 0 ||
      img.samples.size() != std::size_t(img.width) * img.height * img.channels) {
    throw ValidationError("write_png: unsupported image layout for " + path.string());
  }
  detail::FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));

  const std::size_t bytes_per_sample = img.bit_depth / 8;
  const std::size_t row_bytes = std::size_t(img.width) * img.channels * bytes_per_sample;
  std::vector<png_byte> rows(row_bytes * img.height);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    if (bytes_per_sample == 1) {
      rows[i] = static_cast<png_byte>(img.samples[i]);
    } else {
      rows[2 * i] = static_cast<png_byte>(img.samples[i] >> 8);
      rows[2 * i + 1] = static_cast<png_byte>(img.samples[i] & 0xff);
    }
  }
  std::vector<png_bytep> row_ptrs(img.height);
  for (int y = 0; y < img.height; ++y) row_ptrs[y] = rows.data() + row_bytes * y;

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, detail::png_warning_silent);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng: out of memory");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng: failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, img.width, img.height, img.bit_depth,
               img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("failed flushing " + path.string());
}

/// Reads a PNG without any color conversion. Palette, alpha and non 8/16-bit images are
/// rejected rather than converted.
inline PngImage read_png(const std::filesystem::path& path) {
  detail::FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) {
    if (!std::filesystem::exists(path)) throw MissingFile("missing file " + path.string());
    throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw BadMagic(path.string() + " is not a PNG file");
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, detail::png_warning_silent);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng: out of memory");
  }
  PngImage img;
  std::vector<png_byte> rows;
  std::vector<png_bytep> row_ptrs;
  volatile bool bad_layout = false;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("corrupt PNG data in " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.bit_depth = png_get_bit_depth(png, info);
  if ((color_type != PNG_COLOR_TYPE_RGB && color_type != PNG_COLOR_TYPE_GRAY) ||
      (img.bit_depth != 8 && img.bit_depth != 16) || png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
    bad_layout = true;
  } else {
    img.channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    rows.resize(row_bytes * img.height);
    row_ptrs.resize(img.height);
    for (int y = 0; y < img.height; ++y) row_ptrs[y] = rows.data() + row_bytes * y;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (bad_layout) throw ValidationError(path.string() + ": only 8/16-bit gray or RGB non-interlaced PNG is accepted");

  const std::size_t n = std::size_t(img.width) * img.height * img.channels;
  img.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    img.samples[i] = img.bit_depth == 8 ? rows[i] : static_cast<std::uint16_t>((rows[2 * i] << 8) | rows[2 * i + 1]);
  }
  return img;
}

}  // namespace warpforge::io
