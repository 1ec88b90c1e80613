// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "support/scenes.hpp"
#include "warpforge/brute_force_render.hpp"

namespace warpforge {
namespace {

using testing::random_scene;
using testing::TempDir;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Trajectory yaw_sweep(int frames, double yaw) {
  Trajectory t;
  t.name = "yaw";
  t.frame_count = frames;
  Keyframe end;
  end.index = frames - 1;
  end.yaw_deg = yaw;
  t.keyframes = {Keyframe{}, end};
  return t;
}

Outcome identity_round_trip() {
  std::mt19937_64 gen(1);
  const auto t0 = Clock::now();
  int bad = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int w = 8 + int(gen() % 57), h = 8 + int(gen() % 57);
    const auto s = random_scene(seed, w, h, 0.15);
    const RenderResult r = project_render(unproject(s.frame, s.depth, s.camera), s.camera, Pose::identity(), 0);
    for (std::size_t i = 0; i < s.depth.size(); ++i) {
      const bool valid = s.depth.valid(i);
      const bool same = r.image.pixels[3 * i] == s.frame.pixels[3 * i] &&
                        r.image.pixels[3 * i + 1] == s.frame.pixels[3 * i + 1] &&
                        r.image.pixels[3 * i + 2] == s.frame.pixels[3 * i + 2];
      if (bool(r.visibility.bits[i]) != valid || (valid && !same)) ++bad;
    }
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 1.0,
          std::to_string(bad) + " mismatched pixels over 100 scenes, " + fmt("%.3f s (limit 1 s)", secs)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> a(-20.0, 20.0), tr(-0.6, 0.6);
  const auto t0 = Clock::now();
  int differing = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = random_scene(1000 + seed, 32, 32, 0.05);
    Keyframe kf;
    kf.yaw_deg = a(gen);
    kf.pitch_deg = a(gen);
    kf.roll_deg = a(gen) / 4;
    kf.truck = tr(gen);
    kf.pedestal = tr(gen);
    kf.dolly = tr(gen);
    const Pose pose = keyframe_pose(kf, 5.0);
    const PointCloud pc = unproject(s.frame, s.depth, s.camera);
    const RenderResult fast = project_render(pc, s.camera, pose, 0);
    const RenderResult slow = brute_force_render(pc, s.camera, pose);
    if (!(fast.image == slow.image && fast.visibility == slow.visibility && fast.depth.values == slow.depth.values)) {
      ++differing;
    }
  }
  const double secs = seconds_since(t0);
  return {differing == 0 && secs <= 5.0,
          std::to_string(differing) + "/100 scenes differ, " + fmt("%.3f s (limit 5 s)", secs)};
}

Outcome analytic_disocclusion() {
  const auto s = testing::plane_scene(3, 32, 16, 8.0, 4.0f);
  Keyframe kf;
  kf.truck = 1.0;
  const Pose pose = keyframe_pose(kf, 4.0);
  const PointCloud pc = unproject(s.frame, s.depth, s.camera);

  // Forward render: content moves 2 px left.
  const RenderResult fwd = project_render(pc, s.camera, pose, 0);
  bool shift_ok = fwd.image == brute_force_render(pc, s.camera, pose).image;
  for (int v = 0; v < 16; ++v) {
    for (int u = 0; u < 30; ++u) shift_ok = shift_ok && fwd.image.at(u, v) == s.frame.at(u + 2, v);
  }

  std::string widths;
  bool band_ok = true;
  for (int radius = 0; radius <= 1; ++radius) {
    ReprojectOptions opts;
    opts.splat_radius = radius;
    const Mask m = double_reproject_frame(s.frame, s.depth, s.camera, pose, opts).inpaint_mask;
    int lo = 1 << 20, hi = -1;
    for (int v = 0; v < 16; ++v) {
      int width = 0;
      for (int u = 0; u < 32; ++u) width += m.at(u, v);
      // The band must be the contiguous left edge.
      for (int u = 0; u < width; ++u) band_ok = band_ok && m.at(u, v) == 1;
      lo = std::min(lo, width);
      hi = std::max(hi, width);
    }
    band_ok = band_ok && lo == hi && (radius == 0 ? lo == 2 : std::abs(lo - 2) <= 1);
    widths += " r" + std::to_string(radius) + "=" + std::to_string(lo);
  }
  return {shift_ok && band_ok, std::string("shift 2 px ") + (shift_ok ? "ok" : "wrong") + ", band width" + widths};
}

Outcome double_reprojection_identity() {
  int bad = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_scene(2000 + seed, 48, 40);
    const std::vector<Frame> video(9, s.frame);
    const std::vector<DepthFrame> depths(9, s.depth);
    Trajectory t;
    t.name = "still";
    t.frame_count = 9;
    t.keyframes = {Keyframe{}};
    const TrainingPair p = double_reproject(video, depths, s.camera, t);
    for (std::size_t i = 0; i < 9; ++i) bad += p.inpaint_mask[i].count() != 0 || !(p.corrupted[i] == video[i]);
    bad += !(p.clean == video);
  }
  return {bad == 0, std::to_string(bad) + " frames differ over 20 scenes x 9 frames"};
}

Outcome mask_monotonicity() {
  const std::array<double, 5> angles{5, 10, 20, 30, 40};
  std::array<double, 5> mean{};
  for (std::size_t a = 0; a < angles.size(); ++a) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = random_scene(3000 + seed, 64, 48);
      const std::vector<Frame> video(9, s.frame);
      const std::vector<DepthFrame> depths(9, s.depth);
      const TrainingPair p = double_reproject(video, depths, s.camera, yaw_sweep(9, angles[a]));
      for (const Mask& m : p.inpaint_mask) mean[a] += double(m.count()) / double(m.size());
    }
    mean[a] /= 20.0 * 9.0;
  }
  std::string detail = "mean hole fraction";
  bool ok = true;
  for (std::size_t a = 0; a < angles.size(); ++a) {
    detail += fmt(" %.0f:", angles[a]) + fmt("%.4f", mean[a]);
    if (a > 0) ok = ok && mean[a] >= mean[a - 1];
  }
  return {ok, detail};
}

Outcome composite_sampler() {
  std::array<int, 3> counts{};
  for (std::uint64_t seed = 0; seed < 3000; ++seed) ++counts[std::size_t(draw_mask_kind(seed))];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  const bool uniform = chi2 < 9.21034;  // chi-square, 2 dof, p = 0.01

  TrainingPair pair;
  pair.clean.assign(6, Frame::black(40, 30));
  pair.corrupted = pair.clean;
  pair.inpaint_mask.assign(6, Mask::ones(40, 30));
  int touched = 0, edits = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const CompositeSample s = sample_composite(pair, {}, seed);
    if (s.kind != MaskKind::edit) continue;
    ++edits;
    touched += s.mask.frames[0].count() != 0;
  }
  for (std::uint64_t seed = 0; seed < 200; ++seed) touched += make_edit_mask(64, 64, 5, seed).frames[0].count() != 0;
  return {uniform && touched == 0 && edits > 0,
          "counts " + std::to_string(counts[0]) + "/" + std::to_string(counts[1]) + "/" + std::to_string(counts[2]) +
              fmt(", chi2 %.3f < 9.210", chi2) + ", edit masks with nonzero frame 0: " + std::to_string(touched)};
}

Outcome scheduler_gating() {
  TempDir dir("accept_sched");
  const StagePlan plan = plan_stages();
  const auto s = random_scene(4000, 32, 24);
  const std::vector<SourceVideo> src{{"input", s.camera, std::vector<Frame>(5, s.frame),
                                      std::vector<DepthFrame>(5, s.depth)}};
  int over = 0, checked = 0;
  for (int j = 0; j < int(plan.stages.size()); ++j) {
    for (const StageSample& smp : build_stage_samples(plan, j, src, 6, 50 + j)) {
      ++checked;
      over += max_view_angle(smp.trajectory) > plan.stages[std::size_t(j)].max_angle_deg;
    }
  }
  const StageEmission e = emit_stage_dataset(plan, 0, src, 3, 9, dir / "s0");
  for (const auto& rel : e.manifest.bundles) {
    ++checked;
    over += max_view_angle(parse_trajectory(io::read_text(dir / "s0" / rel / "trajectory.traj"))) > 25.0;
  }

  StageState st = load_stage_state(dir / "s0" / kStateFileName);
  bool round_trip = st == e.state;
  st = mark_trained(st, "adapter-0");
  save_stage_state(st, dir / "state.json");
  round_trip = round_trip && load_stage_state(dir / "state.json") == st;

  int rejected = 0;
  auto expect_violation = [&](const std::function<void()>& f) {
    try {
      f();
    } catch (const StageOrderViolation&) {
      ++rejected;
    }
  };
  expect_violation([&] { emit_stage_dataset(plan, 1, src, 1, 1, dir / "s1"); });
  expect_violation([&] { emit_stage_dataset(plan, 1, src, 1, 1, dir / "s1", &st); });
  expect_violation([&] { ingest_generated(e.state, plan, {}); });
  expect_violation([&] { mark_trained(st, "again"); });
  return {over == 0 && checked > 0 && round_trip && rejected == 4,
          std::to_string(checked) + " trajectories, " + std::to_string(over) + " over their stage angle; state round trip " +
              (round_trip ? "ok" : "differs") + "; " + std::to_string(rejected) + "/4 out-of-order transitions rejected"};
}

Outcome packing() {
  std::mt19937_64 gen(5);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + gen() % 100;
    std::vector<std::int64_t> scores(n);
    for (auto& x : scores) x = std::int64_t(gen() % (1 + gen() % 40));
    const int k = 1 + int(gen() % n);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return scores[std::size_t(a)] > scores[std::size_t(b)]; });
    idx.resize(std::size_t(k));
    std::sort(idx.begin(), idx.end());
    mismatches += select_top_k(scores, k) != idx;
  }

  auto noise = [&](int frames) {
    MaskVideo m;
    for (int i = 0; i < frames; ++i) {
      Mask f = Mask::zeros(16, 12);
      for (auto& b : f.bits) b = std::uint8_t(gen() % 3 == 0);
      m.frames.push_back(f);
    }
    return m;
  };
  bool lengths = true;
  for (int n : {1, 5, 81}) {
    for (int k : {1, 4}) {
      if (k > n) continue;
      TrainingPair hole;
      hole.clean.assign(std::size_t(n), Frame::black(16, 12));
      hole.corrupted = hole.clean;
      hole.inpaint_mask = noise(n).frames;
      const std::vector<Frame> generated(std::size_t(n), Frame::black(16, 12));
      const PackedSequence p = build_packed_sequence(generated, noise(n), hole, k);
      lengths = lengths && p.total_frames() == std::size_t(k + n) && p.context_frames.size() == std::size_t(k);
    }
  }
  int outside = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const MaskVideo a = noise(3), b = noise(3), o = overlap_mask(a, b);
    for (std::size_t f = 0; f < 3; ++f) {
      for (std::size_t i = 0; i < o.frames[f].size(); ++i) {
        outside += o.frames[f].bits[i] > a.frames[f].bits[i] || o.frames[f].bits[i] > b.frames[f].bits[i];
      }
    }
  }
  return {mismatches == 0 && lengths && outside == 0,
          std::to_string(mismatches) + "/1000 top-k mismatches; packed length k+N " + (lengths ? "ok" : "wrong") +
              "; " + std::to_string(outside) + " overlap pixels outside an operand"};
}

Outcome pose_algebra() {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Eigen::Quaterniond q(n(gen), n(gen), n(gen), n(gen));
    q.normalize();
    Pose p;
    p.rotation = q.toRotationMatrix();
    p.translation = Eigen::Vector3d(n(gen), n(gen), n(gen)) * 5.0;
    worst = std::max(worst, (compose(p, invert_pose(p)).matrix() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (compose(invert_pose(p), p).matrix() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff());
  }
  const Trajectory sweep = yaw_sweep(81, 30.0);
  const std::vector<Pose> poses = sample_poses(sweep, 4.0);
  const double mid = rad_to_deg(geodesic_angle(poses[40].rotation));
  const double max_angle = max_view_angle(sweep);
  const bool ok = worst <= 1e-9 && std::abs(mid - 15.0) <= 1e-9 && std::abs(max_angle - 30.0) <= 1e-9;
  return {ok, fmt("compose/inverse residual %.2e", worst) + fmt(", slerp midpoint %.12f deg", mid) +
                  fmt(", max view angle %.12f deg", max_angle)};
}

Outcome default_trainer_manifest() {
  TempDir dir("accept_manifest");
  const auto s = random_scene(7000, 16, 16);
  const std::vector<SourceVideo> src{{"input", s.camera, std::vector<Frame>(3, s.frame),
                                      std::vector<DepthFrame>(3, s.depth)}};
  emit_stage_dataset(plan_stages(), 0, src, 1, 1, dir.path());
  const io::json emitted = io::read_json(dir / kTrainerManifestName).at("hyperparameters");
  const io::json expected = {{"rank", 128},        {"lr", 1e-5},         {"steps", 2000},
                             {"weight_decay", 0.1}, {"resolution", 512},  {"length", 81},
                             {"lora_weight", 0.7},  {"sampler_steps", 30}, {"guidance", 6.5}};
  return {emitted == expected, "emitted " + emitted.dump()};
}

Outcome throughput() {
  constexpr int kFrames = 81, kSize = 512;
  const auto s = random_scene(8000, kSize, kSize);
  const std::vector<Frame> video(kFrames, s.frame);
  const std::vector<DepthFrame> depths(kFrames, s.depth);
  const std::vector<Pose> poses = sample_poses(yaw_sweep(kFrames, 30.0), 6.0);

  auto timed = [&](unsigned threads) {
    const auto t0 = Clock::now();
    const auto out = render_trajectory(video, depths, s.camera, poses, kDefaultSplatRadius, threads);
    const double secs = seconds_since(t0);
    return std::make_pair(secs, out.size() == std::size_t(kFrames));
  };
  const auto [single, ok1] = timed(1);
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::clamp(cores, 2u, 8u);
  const auto [parallel, ok2] = timed(workers);
  const double speedup = single / parallel;
  // "Near-linear": at least 80% parallel efficiency.
  const double needed = 0.8 * workers;
  const bool fast = ok1 && single <= 10.0;
  const bool scales = ok2 && speedup >= needed;
  return {fast && scales, fmt("%.2f s single core (limit 10 s); ", single) + std::to_string(workers) +
                              " workers on " + std::to_string(cores) + " available core(s): " +
                              fmt("%.2fx speedup", speedup) + fmt(" (needs %.2fx)", needed)};
}

}  // namespace
}  // namespace warpforge

int main() {
  using namespace warpforge;
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"identity round trip", identity_round_trip},
      {"oracle equivalence", oracle_equivalence},
      {"analytic disocclusion", analytic_disocclusion},
      {"double-reprojection identity", double_reprojection_identity},
      {"mask monotonicity", mask_monotonicity},
      {"composite sampler", composite_sampler},
      {"scheduler gating", scheduler_gating},
      {"packing", packing},
      {"pose algebra", pose_algebra},
      {"default trainer manifest", default_trainer_manifest},
      {"throughput", throughput},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %-30s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
