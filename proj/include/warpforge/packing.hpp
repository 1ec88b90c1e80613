#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "warpforge/error.hpp"
#include "warpforge/maskgen.hpp"
#include "warpforge/reprojection.hpp"

namespace warpforge {

inline constexpr int kDefaultPackK = 4;

struct PackManifest {
  int k = 0;
  std::vector<int> selected;  // ascending frame indices into the generated video
  std::string source;         // trajectory that produced the context frames
  std::string hole_source;    // trajectory of the hole video

  bool operator==(const PackManifest&) const = default;
};

/// Context frames followed by the new trajectory's hole video, in temporal order.
struct PackedSequence {
  std::vector<Frame> context_frames;
  std::vector<Frame> hole_video;
  std::vector<Mask> hole_mask;
  PackManifest manifest;

  std::size_t total_frames() const { return context_frames.size() + hole_video.size(); }
  bool operator==(const PackedSequence&) const = default;
};

/// Number of pixels to inpaint in each frame.
inline std::vector<std::int64_t> frame_inpaint_area(const MaskVideo& masks) {
  std::vector<std::int64_t> scores;
  scores.reserve(masks.frames.size());
  for (const Mask& m : masks.frames) scores.push_back(static_cast<std::int64_t>(m.count()));
  return scores;
}

/// Indices of the k largest scores, ties to the smaller index, returned ascending.
inline std::vector<int> select_top_k(std::span<const std::int64_t> scores, int k) {
  if (k < 1 || std::size_t(k) > scores.size()) {
    throw InvalidK("k must be in [1, " + std::to_string(scores.size()) + "], got " + std::to_string(k));
  }
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    return scores[std::size_t(a)] != scores[std::size_t(b)] ? scores[std::size_t(a)] > scores[std::size_t(b)] : a < b;
  });
  order.resize(std::size_t(k));
  std::sort(order.begin(), order.end());
  return order;
}

inline MaskVideo overlap_mask(const MaskVideo& a, const MaskVideo& b) { return intersect_mask(a, b); }

inline PackedSequence build_packed_sequence(std::span<const Frame> generated_a, const MaskVideo& mask_a,
                                            const TrainingPair& hole_b, int k, std::string source_a = {}) {
  if (generated_a.size() != mask_a.frames.size()) {
    throw LengthMismatch("generated video has " + std::to_string(generated_a.size()) + " frames, its mask " +
                         std::to_string(mask_a.frames.size()));
  }
  if (hole_b.corrupted.size() != hole_b.inpaint_mask.size()) {
    throw LengthMismatch("hole video and hole mask lengths differ");
  }
  const std::vector<std::int64_t> scores = frame_inpaint_area(mask_a);
  PackedSequence out;
  out.manifest.k = k;
  out.manifest.selected = select_top_k(scores, k);
  out.manifest.source = std::move(source_a);
  out.manifest.hole_source = hole_b.trajectory_ref.name;
  for (int i : out.manifest.selected) out.context_frames.push_back(generated_a[std::size_t(i)]);
  out.hole_video = hole_b.corrupted;
  out.hole_mask = hole_b.inpaint_mask;
  return out;
}

}  // namespace warpforge
