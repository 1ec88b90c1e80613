#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "warpforge/geometry.hpp"

namespace warpforge {

/// Reference renderer for project_render with splat radius 0. For every target pixel it
/// scans the whole cloud twice: once for the minimum depth, once for the lowest source
/// pixel within the tie window. Quadratic; intended for equivalence checks on small scenes.
inline RenderResult brute_force_render(const PointCloud& pc, const CameraModel& cam, const Pose& pose) {
  detail::check_cloud(pc);
  const int w = cam.width, h = cam.height;
  RenderResult out{Frame::black(w, h), DepthFrame::invalid(w, h), Mask::zeros(w, h)};

  // Returns true and fills z when point i lands on (pu, pv).
  auto lands_on = [&](std::size_t i, int pu, int pv, double& z) {
    const Eigen::Vector3d& p = pc.points[i];
    const Eigen::Matrix3d& R = pose.rotation;
    const Eigen::Vector3d& t = pose.translation;
    const double x = R(0, 0) * p.x() + R(0, 1) * p.y() + R(0, 2) * p.z() + t.x();
    const double y = R(1, 0) * p.x() + R(1, 1) * p.y() + R(1, 2) * p.z() + t.y();
    z = R(2, 0) * p.x() + R(2, 1) * p.y() + R(2, 2) * p.z() + t.z();
    if (!(z > kNearPlane)) return false;
    const double u = cam.fx * x / z + cam.cx;
    const double v = cam.fy * y / z + cam.cy;
    if (!std::isfinite(u) || !std::isfinite(v)) return false;
    return std::floor(u + 0.5) == double(pu) && std::floor(v + 0.5) == double(pv);
  };

  for (int pv = 0; pv < h; ++pv) {
    for (int pu = 0; pu < w; ++pu) {
      double zmin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < pc.size(); ++i) {
        double z;
        if (lands_on(i, pu, pv, z) && z < zmin) zmin = z;
      }
      if (zmin == std::numeric_limits<double>::infinity()) continue;

      std::size_t best = pc.size();
      for (std::size_t i = 0; i < pc.size(); ++i) {
        double z;
        if (!lands_on(i, pu, pv, z) || z > zmin + kDepthTieEpsilon) continue;
        if (best == pc.size()) {
          best = i;
          continue;
        }
        const SourcePixel& a = pc.source_pixel[i];
        const SourcePixel& b = pc.source_pixel[best];
        if (a.v < b.v || (a.v == b.v && a.u < b.u)) best = i;
      }
      out.image.set(pu, pv, pc.colors[best]);
      out.depth.values[std::size_t(pv) * w + pu] = static_cast<float>(zmin);
      out.visibility.set(pu, pv, 1);
    }
  }
  return out;
}

}  // namespace warpforge
