#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "warpforge/warpforge.hpp"

namespace warpforge::cli {

namespace fs = std::filesystem;
using io::json;

enum ExitCode : int { kOk = 0, kValidation = 2, kIo = 3, kUsage = 4 };

namespace detail {

inline bool has_manifest_family(const fs::path& dir, const std::string& family, const char* file = io::kManifestName) {
  const fs::path p = dir / file;
  if (!fs::is_regular_file(p)) return false;
  const json j = io::read_json(p);
  const auto it = j.find("format");
  return j.is_object() && it != j.end() && it->is_string() && it->get<std::string>().rfind(family + "/", 0) == 0;
}

/// Frames of a bundle, a pair (clean frames), or a bare directory of f_NNNNN.png files.
inline std::vector<Frame> load_frame_sequence(const fs::path& dir, std::string* name) {
  if (has_manifest_family(dir, io::kBundleFamily)) {
    io::VideoBundle b = io::load_bundle(dir);
    if (name) *name = b.name;
    return std::move(b.frames);
  }
  if (!fs::is_directory(dir)) throw MissingFile("missing directory " + dir.string());
  std::vector<Frame> frames;
  for (std::size_t i = 0;; ++i) {
    const fs::path p = dir / io::numbered_name("f_", i, ".png");
    if (!fs::exists(p)) break;
    frames.push_back(io::read_frame(p));
  }
  if (frames.empty()) throw MissingFile(dir.string() + " holds no f_NNNNN.png frames");
  if (name) *name = dir.filename().string();
  return frames;
}

/// Inpaint masks of a pair, a composite sample, a bundle with masks, or a bare directory of
/// m_NNNNN.png files.
inline MaskVideo load_mask_sequence(const fs::path& dir, std::string* name) {
  if (has_manifest_family(dir, io::kPairFamily)) {
    TrainingPair p = io::load_training_pair(dir);
    if (name) *name = p.trajectory_ref.name;
    return {std::move(p.inpaint_mask), MaskKind::pointcloud};
  }
  if (has_manifest_family(dir, io::kSampleFamily)) {
    CompositeSample s = io::load_composite_sample(dir);
    if (name) *name = s.pair.trajectory_ref.name;
    return std::move(s.mask);
  }
  if (has_manifest_family(dir, io::kBundleFamily)) {
    io::VideoBundle b = io::load_bundle(dir);
    if (!b.masks) throw ValidationError(dir.string() + ": bundle has no masks");
    if (name) *name = b.name;
    return {std::move(*b.masks), MaskKind::pointcloud};
  }
  if (!fs::is_directory(dir)) throw MissingFile("missing directory " + dir.string());
  MaskVideo mv;
  for (std::size_t i = 0;; ++i) {
    const fs::path p = dir / io::numbered_name("m_", i, ".png");
    if (!fs::exists(p)) break;
    mv.frames.push_back(io::read_mask(p));
  }
  if (mv.frames.empty()) throw MissingFile(dir.string() + " holds no m_NNNNN.png masks");
  if (name) *name = dir.filename().string();
  return mv;
}

inline TrainingPair load_pair_or_sample(const fs::path& dir) {
  if (has_manifest_family(dir, io::kSampleFamily)) return io::load_composite_sample(dir).pair;
  return io::load_training_pair(dir);
}

/// Trajectory file plus its compiled poses for a bundle.
struct CompiledTrajectory {
  Trajectory trajectory;
  std::vector<Pose> poses;
};

inline CompiledTrajectory compile_for(const fs::path& traj_file, const io::VideoBundle& bundle) {
  CompiledTrajectory c;
  c.trajectory = parse_trajectory(io::read_text(traj_file));
  if (std::size_t(c.trajectory.frame_count) != bundle.frames.size()) {
    throw LengthMismatch("trajectory '" + c.trajectory.name + "' has " + std::to_string(c.trajectory.frame_count) +
                         " frames, bundle has " + std::to_string(bundle.frames.size()));
  }
  double pivot = c.trajectory.pivot_depth.value_or(median_valid_depth(bundle.depths.front()));
  if (!(pivot > 0.0)) pivot = 1.0;
  c.poses = sample_poses(c.trajectory, pivot);
  return c;
}

inline std::vector<io::BundleInfo> find_generated_videos(const fs::path& dir) {
  if (fs::is_regular_file(dir / io::kManifestName)) return {io::inspect_bundle(dir)};
  if (!fs::is_directory(dir)) throw MissingFile("missing directory " + dir.string());
  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::is_regular_file(e.path() / io::kManifestName)) subdirs.push_back(e.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  std::vector<io::BundleInfo> out;
  for (const auto& p : subdirs) out.push_back(io::inspect_bundle(p));
  return out;
}

}  // namespace detail

/// Entry point of the warpforge command line tool. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"warpforge: point-cloud rendering and dataset tooling for 4D video inpainting"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::string bundle, traj, out_dir, pair_dir, mode, plan_file, state_file, videos, generated, mask_dir, hole, path,
      adapter;
  int splat = kDefaultSplatRadius, pair_splat = 0, dilation = 0, stage = 0, k_traj = 3, k = kDefaultPackK;
  std::uint64_t seed = 0;
  double theta_min = kDefaultThetaMin, delta = kDefaultDeltaTheta, theta_target = kDefaultThetaTarget;
  TrainerConfig trainer_defaults;

  auto* render = app.add_subcommand("render", "Render a bundle along a trajectory");
  render->add_option("--bundle", bundle)->required();
  render->add_option("--traj", traj)->required();
  render->add_option("--splat", splat)->check(CLI::Range(0, kMaxSplatRadius))->capture_default_str();
  render->add_option("--out", out_dir)->required();

  auto* pair = app.add_subcommand("pair", "Double reprojection into a source-aligned training pair");
  pair->add_option("--bundle", bundle)->required();
  pair->add_option("--traj", traj)->required();
  pair->add_option("--out", out_dir)->required();
  pair->add_option("--splat", pair_splat)->check(CLI::Range(0, kMaxSplatRadius))->capture_default_str();
  pair->add_option("--dilate", dilation)->check(CLI::Range(0, 64))->capture_default_str();

  auto* masks = app.add_subcommand("masks", "Attach a point-cloud, edit, union or randomly drawn mask");
  masks->add_option("--pair", pair_dir)->required();
  masks->add_option("--mode", mode)->required()->check(CLI::IsMember({"pointcloud", "edit", "union", "sample"}));
  masks->add_option("--seed", seed)->required();
  masks->add_option("--out", out_dir)->required();

  auto* plan = app.add_subcommand("plan", "Plan angle-progressive tuning stages");
  plan->add_option("--theta-min", theta_min)->capture_default_str();
  plan->add_option("--delta", delta)->capture_default_str();
  plan->add_option("--theta-target", theta_target)->capture_default_str();
  plan->add_option("--resolution", trainer_defaults.resolution)->check(CLI::PositiveNumber)->capture_default_str();
  plan->add_option("--length", trainer_defaults.length)->check(CLI::PositiveNumber)->capture_default_str();
  plan->add_option("--out", out_dir)->required();

  auto* stage_cmd = app.add_subcommand("stage", "Emit one stage's training dataset");
  stage_cmd->add_option("--plan", plan_file)->required();
  stage_cmd->add_option("--stage", stage)->required();
  stage_cmd->add_option("--bundle", bundle, "Stage 0: input bundle. Later stages: previous stage directory")
      ->required();
  stage_cmd->add_option("--k-traj", k_traj)->check(CLI::PositiveNumber)->capture_default_str();
  stage_cmd->add_option("--seed", seed)->required();
  stage_cmd->add_option("--out", out_dir)->required();

  auto* trained = app.add_subcommand("trained", "Record the external trainer's adapter for a stage");
  trained->add_option("--state", state_file)->required();
  trained->add_option("--adapter", adapter)->required();

  auto* ingest = app.add_subcommand("ingest", "Ingest videos generated with a stage's adapter");
  ingest->add_option("--state", state_file)->required();
  ingest->add_option("--videos", videos)->required();
  ingest->add_option("--plan", plan_file, "Plan to validate against (default: the stage's trainer manifest)");

  auto* pack = app.add_subcommand("pack", "Build a temporal-packing input sequence");
  pack->add_option("--generated", generated)->required();
  pack->add_option("--mask", mask_dir)->required();
  pack->add_option("--hole", hole)->required();
  pack->add_option("--k", k)->capture_default_str();
  pack->add_option("--out", out_dir)->required();

  auto* validate_cmd = app.add_subcommand("validate", "Fully load and check an artifact directory or file");
  validate_cmd->add_option("--path", path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*render) {
      const io::VideoBundle b = io::load_bundle(bundle, threads);
      const auto c = detail::compile_for(traj, b);
      const auto results = render_trajectory(b.frames, b.depths, b.camera, c.poses, splat, threads);
      io::VideoBundle rendered;
      rendered.name = c.trajectory.name;
      rendered.camera = b.camera;
      rendered.masks.emplace();
      for (const RenderResult& r : results) {
        rendered.frames.push_back(r.image);
        rendered.depths.push_back(r.depth);
        rendered.masks->push_back(r.visibility.inverted());
      }
      const fs::path m = io::store_bundle(rendered, out_dir);
      io::write_text(fs::path(out_dir) / "trajectory.traj", print_trajectory(c.trajectory));
      out << m.string() << "\n";
    } else if (*pair) {
      const io::VideoBundle b = io::load_bundle(bundle, threads);
      const auto c = detail::compile_for(traj, b);
      ReprojectOptions opts{pair_splat, dilation, threads};
      const TrainingPair tp =
          double_reproject(b.frames, b.depths, b.camera, c.poses, {c.trajectory.name, max_view_angle(c.trajectory)}, opts);
      const fs::path m = io::store_training_pair(tp, out_dir);
      io::write_text(fs::path(out_dir) / "trajectory.traj", print_trajectory(c.trajectory));
      out << m.string() << "\n";
    } else if (*masks) {
      const TrainingPair tp = io::load_training_pair(pair_dir);
      const CompositeSample s = mode == "sample" ? sample_composite(tp, {}, seed)
                                                 : make_composite(tp, mask_kind_from_string(mode), {}, seed);
      out << io::store_composite_sample(s, out_dir).string() << "\n";
    } else if (*plan) {
      const StagePlan p = plan_stages(theta_min, delta, theta_target, trainer_defaults);
      if (fs::path(out_dir).has_parent_path()) io::ensure_dir(fs::path(out_dir).parent_path());
      save_plan(p, out_dir);
      for (const Stage& s : p.stages) out << "stage " << s.index << ": " << s.max_angle_deg << " deg\n";
    } else if (*stage_cmd) {
      const StagePlan p = load_plan(plan_file);
      std::vector<SourceVideo> sources;
      std::optional<StageState> previous;
      if (stage == 0) {
        sources.push_back(source_from_bundle(io::load_bundle(bundle, threads)));
      } else {
        const fs::path state_path = fs::path(bundle) / kStateFileName;
        if (!fs::exists(state_path)) {
          throw StageOrderViolation("stage " + std::to_string(stage) + " needs the previous stage directory; " +
                                    state_path.string() + " not found");
        }
        previous = load_stage_state(state_path);
        check_stage_order(stage, &*previous);
        sources = load_generated_sources(*previous);
      }
      const StageEmission e = emit_stage_dataset(p, stage, sources, k_traj, seed, out_dir,
                                                 previous ? &*previous : nullptr, ReprojectOptions{0, 0, threads});
      out << (fs::path(out_dir) / kTrainerManifestName).string() << "\n";
    } else if (*trained) {
      const StageState s = mark_trained(load_stage_state(state_file), adapter);
      save_stage_state(s, state_file);
      out << "stage " << s.stage << ": " << to_string(s.status) << "\n";
    } else if (*ingest) {
      const StageState s = load_stage_state(state_file);
      StagePlan p;
      if (!plan_file.empty()) {
        p = load_plan(plan_file);
      } else {
        const fs::path manifest = fs::path(state_file).parent_path() / s.trainer_manifest;
        p.trainer = stage_manifest_from_json(io::read_json(manifest), manifest).trainer;
      }
      const std::vector<io::BundleInfo> found = detail::find_generated_videos(videos);
      const StageState next = ingest_generated(s, p, found);
      save_stage_state(next, state_file);
      out << "stage " << next.stage << ": " << to_string(next.status) << " (" << next.generated.size()
          << " videos)\n";
    } else if (*pack) {
      std::string source_name;
      const std::vector<Frame> gen = detail::load_frame_sequence(generated, &source_name);
      std::string mask_name;
      const MaskVideo mask_a = detail::load_mask_sequence(mask_dir, &mask_name);
      const TrainingPair hole_b = detail::load_pair_or_sample(hole);
      const PackedSequence ps = build_packed_sequence(gen, mask_a, hole_b, k, mask_name.empty() ? source_name : mask_name);
      out << io::store_packed_sequence(ps, out_dir).string() << "\n";
    } else if (*validate_cmd) {
      const fs::path p(path);
      std::string kind;
      if (fs::is_regular_file(p)) {
        const json j = io::read_json(p);
        const std::string tag = j.is_object() && j.contains("format") && j["format"].is_string() ? j["format"].get<std::string>() : "";
        if (tag.rfind(kPlanFamily, 0) == 0) {
          load_plan(p);
          kind = "plan";
        } else if (j.is_object() && j.contains("status")) {
          stage_state_from_json(j, p);
          kind = "stage state";
        } else {
          stage_manifest_from_json(j, p);
          kind = "trainer manifest";
        }
      } else if (fs::is_regular_file(p / io::kPackManifestName)) {
        io::load_packed_sequence(p);
        kind = "packed sequence";
      } else if (fs::is_regular_file(p / kStateFileName) && !fs::exists(p / io::kManifestName)) {
        const StageState s = load_stage_state(p / kStateFileName);
        const fs::path tm = p / s.trainer_manifest;
        const StageManifest m = stage_manifest_from_json(io::read_json(tm), tm);
        for (const auto& rel : m.bundles) io::load_composite_sample(p / rel);
        kind = "stage dataset";
      } else if (detail::has_manifest_family(p, io::kBundleFamily)) {
        io::load_bundle(p, threads);
        kind = "bundle";
      } else if (detail::has_manifest_family(p, io::kPairFamily)) {
        io::load_training_pair(p);
        kind = "training pair";
      } else if (detail::has_manifest_family(p, io::kSampleFamily)) {
        io::load_composite_sample(p);
        kind = "composite sample";
      } else if (fs::is_regular_file(p / io::kManifestName)) {
        throw BadMagic((p / io::kManifestName).string() + ": unknown artifact format");
      } else {
        throw MissingFile("no manifest found under " + p.string());
      }
      out << "ok: " << kind << "\n";
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

}  // namespace warpforge::cli
