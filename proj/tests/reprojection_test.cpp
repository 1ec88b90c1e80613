#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "support/scenes.hpp"
#include "warpforge/brute_force_render.hpp"
#include "warpforge/reprojection.hpp"

namespace warpforge {
namespace {

using testing::plane_scene;
using testing::random_scene;

Trajectory sweep(const std::string& name, int frames, double yaw, double pitch = 0.0) {
  Trajectory t;
  t.name = name;
  t.frame_count = frames;
  Keyframe last;
  last.index = frames - 1;
  last.yaw_deg = yaw;
  last.pitch_deg = pitch;
  t.keyframes = {Keyframe{}, last};
  return t;
}

Pose moved(double truck, double pedestal) {
  Keyframe kf;
  kf.truck = truck;
  kf.pedestal = pedestal;
  return keyframe_pose(kf, 4.0);
}

double mean_hole_fraction(const TrainingPair& p) {
  double sum = 0.0;
  for (const Mask& m : p.inpaint_mask) sum += double(m.count()) / double(m.size());
  return sum / double(p.inpaint_mask.size());
}

TEST(DoubleReproject, IdentityTrajectoryIsExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_scene(seed, 24, 18);
    const std::vector<Frame> video(5, s.frame);
    const std::vector<DepthFrame> depths(5, s.depth);
    const std::vector<Pose> poses(5, Pose::identity());
    const TrainingPair p = double_reproject(video, depths, s.camera, poses);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_EQ(p.inpaint_mask[i].count(), 0u);
      EXPECT_EQ(p.corrupted[i], s.frame);
      EXPECT_EQ(p.clean[i], s.frame);
    }
  }
}

TEST(DoubleReproject, IdentityKeepsInvalidDepthMasked) {
  const auto s = random_scene(4, 20, 20, 0.2);
  const std::vector<Pose> poses{Pose::identity()};
  const TrainingPair p = double_reproject({&s.frame, 1}, {&s.depth, 1}, s.camera, poses);
  const Mask& m = p.inpaint_mask[0];
  for (int v = 0; v < 20; ++v) {
    for (int u = 0; u < 20; ++u) {
      const bool valid = s.depth.valid(std::size_t(v) * 20 + u);
      EXPECT_EQ(m.at(u, v), valid ? 0 : 1);
      if (valid) {
        EXPECT_EQ(p.corrupted[0].at(u, v), s.frame.at(u, v));
      }
    }
  }
}

TEST(DoubleReproject, CleanIsTheInputVideo) {
  const auto s = random_scene(9, 16, 16);
  const Trajectory t = sweep("yaw", 4, 12.0);
  const std::vector<Frame> video(4, s.frame);
  const std::vector<DepthFrame> depths(4, s.depth);
  const TrainingPair p = double_reproject(video, depths, s.camera, t);
  EXPECT_EQ(p.clean, video);
  EXPECT_EQ(p.trajectory_ref.name, "yaw");
  EXPECT_NEAR(p.trajectory_ref.max_angle_deg, 12.0, 1e-9);
}

TEST(DoubleReproject, TruckRightOpensTwoPixelBandOnTheLeft) {
  // Plane d=4, fx=8, truck 1: the return warp leaves columns 0 and 1 uncovered.
  const auto s = plane_scene(21, 16, 10, 8.0, 4.0f);
  const ReprojectedFrame r = double_reproject_frame(s.frame, s.depth, s.camera, moved(1.0, 0.0));
  for (int v = 0; v < 10; ++v) {
    for (int u = 0; u < 16; ++u) {
      EXPECT_EQ(r.inpaint_mask.at(u, v), u < 2 ? 1 : 0) << u << "," << v;
      if (u >= 2) {
        EXPECT_EQ(r.corrupted.at(u, v), s.frame.at(u, v));
      }
    }
  }
}

TEST(DoubleReproject, BandMatchesBruteForceOracle) {
  const auto s = plane_scene(22, 16, 10, 8.0, 4.0f);
  const Pose pose = moved(1.0, 0.0);
  const RenderResult there = brute_force_render(unproject(s.frame, s.depth, s.camera), s.camera, pose);
  const RenderResult back =
      brute_force_render(unproject(there.image, there.depth, s.camera), s.camera, invert_pose(pose));
  const ReprojectedFrame r = double_reproject_frame(s.frame, s.depth, s.camera, pose);
  EXPECT_EQ(r.inpaint_mask, back.visibility.inverted());
  EXPECT_EQ(r.corrupted, back.image);
}

TEST(DoubleReproject, SplatRadiusNarrowsTheBand) {
  // Each warp's splat reaches r pixels into the hole, so the band is 2 - r wide.
  const auto s = plane_scene(23, 24, 12, 8.0, 4.0f);
  for (int radius = 0; radius <= kMaxSplatRadius; ++radius) {
    ReprojectOptions opts;
    opts.splat_radius = radius;
    const ReprojectedFrame r = double_reproject_frame(s.frame, s.depth, s.camera, moved(1.0, 0.0), opts);
    for (int v = 0; v < 12; ++v) {
      for (int u = 0; u < 24; ++u) EXPECT_EQ(r.inpaint_mask.at(u, v), u < 2 - radius ? 1 : 0) << radius;
    }
  }
}

TEST(DoubleReproject, DilationGrowsMaskAndBlanksIt) {
  const auto s = plane_scene(24, 16, 10, 8.0, 4.0f);
  ReprojectOptions opts;
  opts.mask_dilation = 1;
  const ReprojectedFrame r = double_reproject_frame(s.frame, s.depth, s.camera, moved(1.0, 0.0), opts);
  for (int v = 0; v < 10; ++v) {
    for (int u = 0; u < 16; ++u) {
      EXPECT_EQ(r.inpaint_mask.at(u, v), u < 3 ? 1 : 0);
      if (u < 3) {
        EXPECT_EQ(r.corrupted.at(u, v), (Rgb{0, 0, 0}));
      }
    }
  }
}

TEST(DoubleReproject, LargerYawExposesMore) {
  const auto s = random_scene(31, 48, 36);
  const std::vector<Frame> video(6, s.frame);
  const std::vector<DepthFrame> depths(6, s.depth);
  const double small = mean_hole_fraction(double_reproject(video, depths, s.camera, sweep("a", 6, 10.0)));
  const double large = mean_hole_fraction(double_reproject(video, depths, s.camera, sweep("b", 6, 30.0)));
  EXPECT_GT(large, small);
}

TEST(DoubleReproject, MeanHoleAreaGrowsWithSweepAngle) {
  const double angles[] = {5, 10, 20, 30, 40};
  double prev = -1.0;
  for (double a : angles) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto s = random_scene(100 + seed, 32, 24);
      const std::vector<Frame> video(4, s.frame);
      const std::vector<DepthFrame> depths(4, s.depth);
      total += mean_hole_fraction(double_reproject(video, depths, s.camera, sweep("y", 4, a)));
    }
    EXPECT_GE(total, prev) << a;
    prev = total;
  }
}

double aligned_fraction(const Frame& corrupted, const Mask& hole, const Frame& clean) {
  std::size_t kept = 0, agree = 0;
  for (int v = 0; v < clean.height; ++v) {
    for (int u = 0; u < clean.width; ++u) {
      if (hole.at(u, v)) continue;
      ++kept;
      agree += corrupted.at(u, v) == clean.at(u, v);
    }
  }
  return kept ? double(agree) / double(kept) : 1.0;
}

Pose rotation_only(double yaw, double pitch) {
  Keyframe kf;
  kf.yaw_deg = yaw;
  kf.pitch_deg = pitch;
  return keyframe_pose(kf, 0.0);
}

TEST(DoubleReproject, TinyRotationsRoundTripExactly) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = random_scene(200 + seed, 64, 48);
    for (double a : {0.5, 1.0, 2.5}) {
      const ReprojectedFrame r = double_reproject_frame(s.frame, s.depth, s.camera, rotation_only(a, 0.0));
      EXPECT_EQ(aligned_fraction(r.corrupted, r.inpaint_mask, s.frame), 1.0) << seed << " " << a;
    }
  }
}

TEST(DoubleReproject, RotationsUpToTenDegreesStayMostlyAligned) {
  // Nearest-pixel splatting shifts a few pixels by one where the warp compresses.
  // Per-pixel noise textures make every such shift a mismatch; 95% is the measured floor.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = random_scene(200 + seed, 64, 48);
    for (double a : {5.0, 7.5, 10.0}) {
      const ReprojectedFrame r = double_reproject_frame(s.frame, s.depth, s.camera, rotation_only(a, a / 3));
      EXPECT_GE(aligned_fraction(r.corrupted, r.inpaint_mask, s.frame), 0.95) << seed << " " << a;
    }
  }
}

TEST(DoubleReproject, ThreadCountDoesNotChangeOutput) {
  const auto s = random_scene(41, 32, 24);
  const std::vector<Frame> video(6, s.frame);
  const std::vector<DepthFrame> depths(6, s.depth);
  ReprojectOptions one, four;
  one.threads = 1;
  four.threads = 4;
  EXPECT_EQ(double_reproject(video, depths, s.camera, sweep("t", 6, 20.0), one),
            double_reproject(video, depths, s.camera, sweep("t", 6, 20.0), four));
}

TEST(DoubleReproject, LengthAndSizeErrors) {
  const auto s = random_scene(1, 8, 8);
  const std::vector<Frame> video(2, s.frame);
  const std::vector<DepthFrame> depths(3, s.depth);
  const std::vector<Pose> poses(2);
  EXPECT_THROW(double_reproject(video, depths, s.camera, poses), LengthMismatch);
  EXPECT_THROW(double_reproject(video, {depths.data(), 2}, s.camera, sweep("x", 3, 5.0)), LengthMismatch);
  const auto other = random_scene(1, 9, 8);
  const std::vector<DepthFrame> wrong(2, other.depth);
  EXPECT_THROW(double_reproject(video, wrong, s.camera, poses), DimensionMismatch);
}

}  // namespace
}  // namespace warpforge
