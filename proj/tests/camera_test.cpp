#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "warpforge/camera.hpp"
#include "warpforge/trajectory.hpp"

namespace warpforge {
namespace {

Pose random_pose(std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(gen), n(gen), n(gen), n(gen));
  q.normalize();
  Pose p;
  p.rotation = q.toRotationMatrix();
  p.translation = Eigen::Vector3d(n(gen), n(gen), n(gen)) * 3.0;
  return p;
}

TEST(CameraModel, ValidatesIntrinsics) {
  EXPECT_NO_THROW(CameraModel::make(500, 500, 256, 256, 512, 512));
  EXPECT_THROW(CameraModel::make(0, 500, 256, 256, 512, 512), ValidationError);
  EXPECT_THROW(CameraModel::make(500, -1, 256, 256, 512, 512), ValidationError);
  EXPECT_THROW(CameraModel::make(500, 500, 512, 256, 512, 512), ValidationError);
  EXPECT_THROW(CameraModel::make(500, 500, 256, -0.5, 512, 512), ValidationError);
  EXPECT_THROW(CameraModel::make(500, 500, 0, 0, 0, 512), ValidationError);
}

TEST(Pose, InverseOfIdentityIsIdentity) { EXPECT_EQ(invert_pose(Pose::identity()), Pose::identity()); }

TEST(Pose, InverseOfPureTranslation) {
  Pose p;
  p.translation = Eigen::Vector3d(0, 0, 1);
  const Pose inv = invert_pose(p);
  EXPECT_EQ(inv.rotation, Eigen::Matrix3d::Identity());
  EXPECT_EQ(inv.translation, Eigen::Vector3d(0, 0, -1));
}

TEST(Pose, ComposeWithInverseIsIdentityOnRandomPoses) {
  std::mt19937_64 gen(1234);
  for (int i = 0; i < 500; ++i) {
    const Pose p = random_pose(gen);
    const Eigen::Matrix4d a = compose(p, invert_pose(p)).matrix();
    const Eigen::Matrix4d b = compose(invert_pose(p), p).matrix();
    EXPECT_LE((a - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((b - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Pose, CompositionMatchesMatrixProduct) {
  std::mt19937_64 gen(99);
  for (int i = 0; i < 100; ++i) {
    const Pose a = random_pose(gen), b = random_pose(gen);
    EXPECT_LE((compose(a, b).matrix() - a.matrix() * b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Pose, RotationStaysOrthonormalUnderRepeatedComposition) {
  std::mt19937_64 gen(7);
  Pose acc;
  for (int i = 0; i < 10000; ++i) acc = compose(acc, random_pose(gen));
  EXPECT_TRUE(is_rotation(acc.rotation, 1e-9)) << orthonormality_error(acc.rotation);
}

TEST(Pose, CenterRoundTrip) {
  std::mt19937_64 gen(5);
  const Pose p = random_pose(gen);
  const Pose q = Pose::from_camera(p.rotation.transpose(), p.center());
  EXPECT_LE((q.matrix() - p.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GeodesicAngle, MatchesAxisAngle) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> angle(1e-6, 3.1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = angle(gen);
    const Eigen::Vector3d axis = Eigen::Vector3d(n(gen), n(gen), n(gen)).normalized();
    const Eigen::Matrix3d r = Eigen::AngleAxisd(a, axis).toRotationMatrix();
    EXPECT_NEAR(geodesic_angle(r), a, 1e-12);
  }
}

TEST(Slerp, EndpointsAndMidpoint) {
  const Eigen::Quaterniond a = Eigen::Quaterniond::Identity();
  const Eigen::Quaterniond b(Eigen::AngleAxisd(deg_to_rad(30.0), Eigen::Vector3d::UnitY()));
  EXPECT_LE((slerp(a, b, 0.0).coeffs() - a.coeffs()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((slerp(a, b, 1.0).coeffs() - b.coeffs()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(rad_to_deg(geodesic_angle(slerp(a, b, 0.5).toRotationMatrix())), 15.0, 1e-9);
}

TEST(Slerp, TakesTheShortArc) {
  const Eigen::Quaterniond a = Eigen::Quaterniond::Identity();
  Eigen::Quaterniond b(Eigen::AngleAxisd(deg_to_rad(40.0), Eigen::Vector3d::UnitX()));
  b.coeffs() = -b.coeffs();
  EXPECT_NEAR(rad_to_deg(geodesic_angle(slerp(a, b, 0.5).toRotationMatrix())), 20.0, 1e-9);
}

}  // namespace
}  // namespace warpforge
