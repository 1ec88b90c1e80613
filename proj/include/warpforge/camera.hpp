#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "warpforge/error.hpp"

namespace warpforge {

/// Pinhole intrinsics. Pixel origin is the top-left corner, +u right, +v down.
struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  /// Builds a camera and enforces fx,fy > 0, 0 <= cx < width, 0 <= cy < height.
  static CameraModel make(double fx, double fy, double cx, double cy, int width, int height) {
    CameraModel cam{fx, fy, cx, cy, width, height};
    cam.validate();
    return cam;
  }

  void validate() const {
    if (width <= 0 || height <= 0) {
      throw ValidationError("camera: width and height must be positive");
    }
    if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
      throw ValidationError("camera: focal lengths must be positive and finite");
    }
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
      throw ValidationError("camera: principal point outside the image");
    }
  }

  bool operator==(const CameraModel&) const = default;
};

/// Rigid world-to-camera transform: x_cam = rotation * x_world + translation.
/// Cameras look along +Z with +X right and +Y down.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return {}; }

  /// Pose whose camera sits at `center` with camera-to-world orientation `camera_to_world`.
  static Pose from_camera(const Eigen::Matrix3d& camera_to_world, const Eigen::Vector3d& center) {
    Pose p;
    p.rotation = camera_to_world.transpose();
    p.translation = -(p.rotation * center);
    return p;
  }

  Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return rotation * x + translation; }

  /// Camera center in world coordinates.
  Eigen::Vector3d center() const { return -(rotation.transpose() * translation); }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  bool operator==(const Pose& other) const {
    return rotation == other.rotation && translation == other.translation;
  }
};

/// x -> a(b(x)).
inline Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

inline Pose invert_pose(const Pose& p) {
  Pose out;
  out.rotation = p.rotation.transpose();
  out.translation = -(out.rotation * p.translation);
  return out;
}

/// ‖RᵀR − I‖∞ (elementwise max).
inline double orthonormality_error(const Eigen::Matrix3d& r) {
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

inline bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-9) {
  return orthonormality_error(r) <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

inline double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

/// Rotation angle of R in radians, via atan2 of the skew and trace parts so that
/// small angles keep full precision.
inline double geodesic_angle(const Eigen::Matrix3d& r) {
  const double s = 0.5 * Eigen::Vector3d(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)).norm();
  const double c = 0.5 * (r.trace() - 1.0);
  return std::atan2(s, c);
}

inline Eigen::Matrix3d rotation_x(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}

inline Eigen::Matrix3d rotation_y(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Eigen::Matrix3d m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}

inline Eigen::Matrix3d rotation_z(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Eigen::Matrix3d m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

/// Shortest-arc spherical interpolation of unit quaternions. t=0 and t=1 return the
/// endpoints (up to the sign flip used to stay on the short arc).
inline Eigen::Quaterniond slerp(const Eigen::Quaterniond& a, Eigen::Quaterniond b, double t) {
  double dot = a.coeffs().dot(b.coeffs());
  if (dot < 0.0) {
    b.coeffs() = -b.coeffs();
    dot = -dot;
  }
  Eigen::Vector4d out;
  if (dot > 1.0 - 1e-12) {
    out = (1.0 - t) * a.coeffs() + t * b.coeffs();
  } else {
    const double theta = std::acos(std::clamp(dot, -1.0, 1.0));
    const double inv_sin = 1.0 / std::sin(theta);
    out = std::sin((1.0 - t) * theta) * inv_sin * a.coeffs() + std::sin(t * theta) * inv_sin * b.coeffs();
  }
  Eigen::Quaterniond q;
  q.coeffs() = out.normalized();
  return q;
}

}  // namespace warpforge
