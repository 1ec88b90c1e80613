#pragma once

#include <span>
#include <string>
#include <vector>

#include "warpforge/geometry.hpp"
#include "warpforge/trajectory.hpp"

namespace warpforge {

struct TrajectoryRef {
  std::string name;
  double max_angle_deg = 0.0;
  bool operator==(const TrajectoryRef&) const = default;
};

/// Source-aligned training example: the corrupted video, where to inpaint, and the
/// untouched input it should reconstruct.
struct TrainingPair {
  std::vector<Frame> corrupted;
  std::vector<Mask> inpaint_mask;  // 1 = fill
  std::vector<Frame> clean;
  TrajectoryRef trajectory_ref;

  std::size_t frame_count() const { return clean.size(); }
  bool operator==(const TrainingPair&) const = default;
};

struct ReprojectOptions {
  /// Splat radius used for both warps. 0 keeps the identity round trip bit-exact.
  int splat_radius = 0;
  /// Extra square dilation of the hole mask, in pixels.
  int mask_dilation = 0;
  unsigned threads = 0;
};

struct ReprojectedFrame {
  Frame corrupted;
  Mask inpaint_mask;
};

/// Warps one frame to the target view and back. The intermediate z-buffer is the depth
/// used to lift the rendered view; pixels that were empty there stay empty.
inline ReprojectedFrame double_reproject_frame(const Frame& frame, const DepthFrame& depth, const CameraModel& cam,
                                               const Pose& pose, const ReprojectOptions& opts = {}) {
  const RenderResult there = project_render(unproject(frame, depth, cam), cam, pose, opts.splat_radius);
  RenderResult back = project_render(unproject(there.image, there.depth, cam), cam, invert_pose(pose), opts.splat_radius);
  Mask hole = dilate(back.visibility.inverted(), opts.mask_dilation);
  if (opts.mask_dilation > 0) {
    for (std::size_t i = 0; i < hole.size(); ++i) {
      if (!hole.bits[i]) continue;
      back.image.pixels[3 * i] = back.image.pixels[3 * i + 1] = back.image.pixels[3 * i + 2] = 0;
    }
  }
  return {std::move(back.image), std::move(hole)};
}

inline TrainingPair double_reproject(std::span<const Frame> video, std::span<const DepthFrame> depths,
                                     const CameraModel& cam, std::span<const Pose> poses,
                                     TrajectoryRef ref = {}, const ReprojectOptions& opts = {}) {
  if (video.empty()) throw LengthMismatch("double_reproject: empty video");
  if (video.size() != depths.size() || video.size() != poses.size()) {
    throw LengthMismatch("double_reproject: " + std::to_string(video.size()) + " frames, " +
                         std::to_string(depths.size()) + " depths, " + std::to_string(poses.size()) + " poses");
  }
  TrainingPair pair;
  pair.corrupted.resize(video.size());
  pair.inpaint_mask.resize(video.size());
  pair.clean.assign(video.begin(), video.end());
  pair.trajectory_ref = std::move(ref);
  parallel_for(
      video.size(),
      [&](std::size_t i) {
        ReprojectedFrame f = double_reproject_frame(video[i], depths[i], cam, poses[i], opts);
        pair.corrupted[i] = std::move(f.corrupted);
        pair.inpaint_mask[i] = std::move(f.inpaint_mask);
      },
      opts.threads);
  return pair;
}

/// Convenience overload: compiles the trajectory (resolving "pivot auto" from the median
/// depth of frame 0) and records its name and maximum view angle.
inline TrainingPair double_reproject(std::span<const Frame> video, std::span<const DepthFrame> depths,
                                     const CameraModel& cam, const Trajectory& traj,
                                     const ReprojectOptions& opts = {}) {
  if (depths.empty()) throw LengthMismatch("double_reproject: empty video");
  if (std::size_t(traj.frame_count) != video.size()) {
    throw LengthMismatch("trajectory '" + traj.name + "' has " + std::to_string(traj.frame_count) +
                         " frames, video has " + std::to_string(video.size()));
  }
  double pivot = traj.pivot_depth.value_or(median_valid_depth(depths.front()));
  if (!(pivot > 0.0)) pivot = 1.0;
  const std::vector<Pose> poses = sample_poses(traj, pivot);
  return double_reproject(video, depths, cam, poses, {traj.name, max_view_angle(traj)}, opts);
}

}  // namespace warpforge
