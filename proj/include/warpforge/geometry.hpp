#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "warpforge/camera.hpp"
#include "warpforge/error.hpp"
#include "warpforge/image.hpp"
#include "warpforge/parallel.hpp"

namespace warpforge {

/// Points at or behind this camera-space depth are culled.
inline constexpr double kNearPlane = 1e-4;
/// Depths within this distance of the per-pixel minimum count as a tie.
inline constexpr double kDepthTieEpsilon = 1e-6;
inline constexpr int kMaxSplatRadius = 2;
inline constexpr int kDefaultSplatRadius = 1;

struct SourcePixel {
  int u = 0;
  int v = 0;
  bool operator==(const SourcePixel&) const = default;
};

/// Colored points in camera coordinates with the pixel each one was lifted from.
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Rgb> colors;
  std::vector<SourcePixel> source_pixel;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct RenderResult {
  Frame image;
  DepthFrame depth;
  Mask visibility;  // 1 where at least one point landed
};

inline void check_same_size(const Frame& frame, const DepthFrame& depth, const CameraModel& cam) {
  if (frame.width != depth.width || frame.height != depth.height || frame.width != cam.width ||
      frame.height != cam.height) {
    throw DimensionMismatch("frame " + std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                            ", depth " + std::to_string(depth.width) + "x" + std::to_string(depth.height) +
                            ", camera " + std::to_string(cam.width) + "x" + std::to_string(cam.height));
  }
  if (frame.pixels.size() != 3 * frame.size() || depth.values.size() != depth.size()) {
    throw DimensionMismatch("pixel buffer size does not match declared dimensions");
  }
}

/// Lifts every valid-depth pixel to x=(u-cx)/fx*d, y=(v-cy)/fy*d, z=d. Points come out in
/// row-major source order.
inline PointCloud unproject(const Frame& frame, const DepthFrame& depth, const CameraModel& cam) {
  check_same_size(frame, depth, cam);
  PointCloud pc;
  std::size_t n = 0;
  for (std::size_t i = 0; i < depth.size(); ++i) n += depth.valid(i) ? 1 : 0;
  pc.points.reserve(n);
  pc.colors.reserve(n);
  pc.source_pixel.reserve(n);
  for (int v = 0; v < frame.height; ++v) {
    for (int u = 0; u < frame.width; ++u) {
      const std::size_t i = std::size_t(v) * frame.width + u;
      if (!depth.valid(i)) continue;
      const double d = depth.values[i];
      pc.points.emplace_back((u - cam.cx) / cam.fx * d, (v - cam.cy) / cam.fy * d, d);
      pc.colors.push_back(frame.at(u, v));
      pc.source_pixel.push_back({u, v});
    }
  }
  return pc;
}

namespace detail {

/// Ordering key for deterministic tie breaks: row-major source pixel.
inline std::uint64_t source_key(const SourcePixel& s) {
  return (std::uint64_t(std::uint32_t(s.v)) << 32) | std::uint32_t(s.u);
}

inline void check_cloud(const PointCloud& pc) {
  if (pc.colors.size() != pc.points.size() || pc.source_pixel.size() != pc.points.size()) {
    throw DimensionMismatch("point cloud attribute lists differ in length");
  }
}

}  // namespace detail

/// Forward-warps a point cloud into `cam` at `pose` with a z-buffer.
///
/// Each point splats a (2r+1)x(2r+1) square centred on its rounded projection. The
/// rendered depth of a pixel is the minimum z covering it; its color comes from the
/// covering point with z within kDepthTieEpsilon of that minimum and the lowest source
/// pixel index. Output does not depend on point order beyond equal source pixels.
inline RenderResult project_render(const PointCloud& pc, const CameraModel& cam, const Pose& pose,
                                   int splat_radius = kDefaultSplatRadius) {
  if (splat_radius < 0 || splat_radius > kMaxSplatRadius) {
    throw ValidationError("splat radius must be in [0, 2], got " + std::to_string(splat_radius));
  }
  detail::check_cloud(pc);
  const int w = cam.width, h = cam.height, r = splat_radius;
  const std::size_t npix = std::size_t(w) * h;

  struct Hit {
    int u;
    int v;
    double z;
  };
  std::vector<Hit> hits(pc.size());
  std::vector<double> zbuf(npix, std::numeric_limits<double>::infinity());

  const Eigen::Matrix3d& R = pose.rotation;
  const Eigen::Vector3d& t = pose.translation;
  const double lo_u = -r - 1.0, hi_u = w + r + 1.0;
  const double lo_v = -r - 1.0, hi_v = h + r + 1.0;

  for (std::size_t i = 0; i < pc.size(); ++i) {
    const Eigen::Vector3d& p = pc.points[i];
    const double x = R(0, 0) * p.x() + R(0, 1) * p.y() + R(0, 2) * p.z() + t.x();
    const double y = R(1, 0) * p.x() + R(1, 1) * p.y() + R(1, 2) * p.z() + t.y();
    const double z = R(2, 0) * p.x() + R(2, 1) * p.y() + R(2, 2) * p.z() + t.z();
    hits[i].z = -1.0;
    if (!(z > kNearPlane)) continue;
    const double u = cam.fx * x / z + cam.cx;
    const double v = cam.fy * y / z + cam.cy;
    if (!(u > lo_u && u < hi_u && v > lo_v && v < hi_v)) continue;
    const int pu = static_cast<int>(std::floor(u + 0.5));
    const int pv = static_cast<int>(std::floor(v + 0.5));
    hits[i] = {pu, pv, z};
    for (int yy = std::max(0, pv - r); yy <= std::min(h - 1, pv + r); ++yy) {
      double* row = zbuf.data() + std::size_t(yy) * w;
      for (int xx = std::max(0, pu - r); xx <= std::min(w - 1, pu + r); ++xx) {
        if (z < row[xx]) row[xx] = z;
      }
    }
  }

  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> winner(npix, kNone);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const Hit& hit = hits[i];
    if (hit.z < 0.0) continue;
    const std::uint64_t key = detail::source_key(pc.source_pixel[i]);
    for (int yy = std::max(0, hit.v - r); yy <= std::min(h - 1, hit.v + r); ++yy) {
      for (int xx = std::max(0, hit.u - r); xx <= std::min(w - 1, hit.u + r); ++xx) {
        const std::size_t px = std::size_t(yy) * w + xx;
        if (hit.z > zbuf[px] + kDepthTieEpsilon) continue;
        std::uint32_t& cur = winner[px];
        if (cur == kNone || key < detail::source_key(pc.source_pixel[cur])) {
          cur = static_cast<std::uint32_t>(i);
        }
      }
    }
  }

  RenderResult out{Frame::black(w, h), DepthFrame::invalid(w, h), Mask::zeros(w, h)};
  for (std::size_t px = 0; px < npix; ++px) {
    if (winner[px] == kNone) continue;
    const Rgb& c = pc.colors[winner[px]];
    out.image.pixels[3 * px] = c[0];
    out.image.pixels[3 * px + 1] = c[1];
    out.image.pixels[3 * px + 2] = c[2];
    out.depth.values[px] = static_cast<float>(zbuf[px]);
    out.visibility.bits[px] = 1;
  }
  return out;
}

/// Renders each frame's own point cloud at its pose. Frames are independent and run in
/// parallel; results do not depend on `threads`.
inline std::vector<RenderResult> render_trajectory(std::span<const Frame> video, std::span<const DepthFrame> depths,
                                                   const CameraModel& cam, std::span<const Pose> poses,
                                                   int splat_radius = kDefaultSplatRadius, unsigned threads = 0) {
  if (video.empty()) throw LengthMismatch("render_trajectory: empty video");
  if (video.size() != depths.size() || video.size() != poses.size()) {
    throw LengthMismatch("render_trajectory: " + std::to_string(video.size()) + " frames, " +
                         std::to_string(depths.size()) + " depths, " + std::to_string(poses.size()) + " poses");
  }
  std::vector<RenderResult> out(video.size());
  parallel_for(
      video.size(),
      [&](std::size_t i) { out[i] = project_render(unproject(video[i], depths[i], cam), cam, poses[i], splat_radius); },
      threads);
  return out;
}

/// Median of the valid depths (mean of the middle pair for even counts); 0 if none.
inline double median_valid_depth(const DepthFrame& depth) {
  std::vector<float> vals;
  vals.reserve(depth.size());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (depth.valid(i)) vals.push_back(depth.values[i]);
  }
  if (vals.empty()) return 0.0;
  const std::size_t mid = vals.size() / 2;
  std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
  const double upper = vals[mid];
  if (vals.size() % 2 == 1) return upper;
  const double lower = *std::max_element(vals.begin(), vals.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace warpforge
