#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "warpforge/error.hpp"
#include "warpforge/image.hpp"
#include "warpforge/random.hpp"
#include "warpforge/reprojection.hpp"

namespace warpforge {

enum class MaskKind { pointcloud, edit, union_ };

inline std::string_view to_string(MaskKind k) {
  switch (k) {
    case MaskKind::pointcloud: return "pointcloud";
    case MaskKind::edit: return "edit";
    case MaskKind::union_: return "union";
  }
  return "?";
}

inline MaskKind mask_kind_from_string(std::string_view s) {
  if (s == "pointcloud") return MaskKind::pointcloud;
  if (s == "edit") return MaskKind::edit;
  if (s == "union") return MaskKind::union_;
  throw ValidationError("unknown mask kind '" + std::string(s) + "'");
}

struct MaskVideo {
  std::vector<Mask> frames;  // 1 = fill/edit
  MaskKind kind = MaskKind::pointcloud;

  bool operator==(const MaskVideo&) const = default;
};

/// Bounds of the random edit rectangle.
struct EditMaskConfig {
  double area_min = 0.05;  // fraction of the frame
  double area_max = 0.40;
  double aspect_min = 0.5;  // width / height
  double aspect_max = 2.0;
};

struct CompositeSample {
  TrainingPair pair;
  MaskVideo mask;
  MaskKind kind = MaskKind::pointcloud;
  std::uint64_t seed = 0;

  bool operator==(const CompositeSample&) const = default;
};

/// Rectangle in pixels; x, y top-left.
struct EditRect {
  int x = 0, y = 0, width = 0, height = 0;
};

/// Draws the edit rectangle for a width x height frame.
inline EditRect sample_edit_rect(int width, int height, Rng& rng, const EditMaskConfig& cfg = {}) {
  const double frame_area = double(width) * height;
  const double area = rng.uniform(cfg.area_min, cfg.area_max) * frame_area;
  const double aspect = rng.uniform(cfg.aspect_min, cfg.aspect_max);
  const double lo = cfg.area_min * frame_area, hi = cfg.area_max * frame_area;

  EditRect r;
  r.width = std::clamp(static_cast<int>(std::lround(std::sqrt(area * aspect))), 1, width);
  r.height = std::clamp(static_cast<int>(std::lround(area / r.width)), 1, height);
  // Rounding can leave the area just outside the bounds; nudge the height back in.
  if (double(r.width) * r.height < lo) r.height = std::min(height, static_cast<int>(std::ceil(lo / r.width)));
  if (double(r.width) * r.height > hi) r.height = std::max(1, static_cast<int>(std::floor(hi / r.width)));

  r.x = static_cast<int>(rng.below(std::uint64_t(width - r.width) + 1));
  r.y = static_cast<int>(rng.below(std::uint64_t(height - r.height) + 1));
  return r;
}

/// A static rectangle on frames 1..N-1. Frame 0 is the guidance frame and stays empty.
inline MaskVideo make_edit_mask(int width, int height, int frame_count, std::uint64_t seed,
                                const EditMaskConfig& cfg = {}) {
  if (width <= 0 || height <= 0 || frame_count < 1) {
    throw ValidationError("make_edit_mask: dimensions must be positive and frame_count >= 1");
  }
  Rng rng(seed);
  const EditRect r = sample_edit_rect(width, height, rng, cfg);
  Mask rect = Mask::zeros(width, height);
  for (int v = r.y; v < r.y + r.height; ++v) {
    std::fill_n(rect.bits.begin() + std::ptrdiff_t(v) * width + r.x, r.width, std::uint8_t{1});
  }
  MaskVideo out;
  out.kind = MaskKind::edit;
  out.frames.reserve(std::size_t(frame_count));
  out.frames.push_back(Mask::zeros(width, height));
  for (int i = 1; i < frame_count; ++i) out.frames.push_back(rect);
  return out;
}

namespace detail {

inline void check_same_shape(const MaskVideo& a, const MaskVideo& b, const char* op) {
  if (a.frames.size() != b.frames.size()) {
    throw DimensionMismatch(std::string(op) + ": " + std::to_string(a.frames.size()) + " vs " +
                            std::to_string(b.frames.size()) + " frames");
  }
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    if (a.frames[i].width != b.frames[i].width || a.frames[i].height != b.frames[i].height) {
      throw DimensionMismatch(std::string(op) + ": frame " + std::to_string(i) + " dimensions differ");
    }
  }
}

template <typename Op>
MaskVideo combine(const MaskVideo& a, const MaskVideo& b, const char* name, Op op) {
  check_same_shape(a, b, name);
  MaskVideo out;
  out.kind = MaskKind::union_;
  out.frames = a.frames;
  for (std::size_t f = 0; f < out.frames.size(); ++f) {
    auto& dst = out.frames[f].bits;
    const auto& src = b.frames[f].bits;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = op(dst[i], src[i]);
  }
  return out;
}

}  // namespace detail

inline MaskVideo union_mask(const MaskVideo& a, const MaskVideo& b) {
  return detail::combine(a, b, "union_mask", [](std::uint8_t x, std::uint8_t y) -> std::uint8_t { return x | y; });
}

/// Elementwise AND; used for overlap between two source-aligned hole masks.
inline MaskVideo intersect_mask(const MaskVideo& a, const MaskVideo& b) {
  return detail::combine(a, b, "overlap_mask", [](std::uint8_t x, std::uint8_t y) -> std::uint8_t { return x & y; });
}

inline MaskVideo pointcloud_mask(const TrainingPair& pair) { return {pair.inpaint_mask, MaskKind::pointcloud}; }

/// Builds the sample for a given mask kind. The edit mask seed is derived from `seed`.
inline CompositeSample make_composite(const TrainingPair& pair, MaskKind kind, const EditMaskConfig& cfg,
                                      std::uint64_t seed) {
  if (pair.inpaint_mask.empty() || pair.inpaint_mask.size() != pair.clean.size() ||
      pair.corrupted.size() != pair.clean.size()) {
    throw LengthMismatch("training pair sequences must be non-empty and equally long");
  }
  CompositeSample s;
  s.pair = pair;
  s.kind = kind;
  s.seed = seed;
  if (kind == MaskKind::pointcloud) {
    s.mask = pointcloud_mask(pair);
    return s;
  }
  const Mask& first = pair.inpaint_mask.front();
  MaskVideo edit = make_edit_mask(first.width, first.height, int(pair.inpaint_mask.size()), derive_seed(seed, 1), cfg);
  s.mask = kind == MaskKind::edit ? std::move(edit) : union_mask(pointcloud_mask(pair), edit);
  return s;
}

/// Draws the mask kind uniformly from {pointcloud, edit, union} and attaches that mask.
inline MaskKind draw_mask_kind(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  return static_cast<MaskKind>(rng.below(3));
}

inline CompositeSample sample_composite(const TrainingPair& pair, const EditMaskConfig& cfg, std::uint64_t seed) {
  return make_composite(pair, draw_mask_kind(seed), cfg, seed);
}

}  // namespace warpforge
