#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warpforge/error.hpp"
#include "warpforge/geometry.hpp"
#include "warpforge/io/artifacts.hpp"
#include "warpforge/io/bundle.hpp"
#include "warpforge/io/json_util.hpp"
#include "warpforge/maskgen.hpp"
#include "warpforge/random.hpp"
#include "warpforge/reprojection.hpp"
#include "warpforge/trajectory.hpp"

namespace warpforge {

namespace fs = std::filesystem;
using io::json;

inline constexpr const char* kStageFamily = "fyc-stage";
inline constexpr const char* kPlanFamily = "fyc-plan";
inline constexpr const char* kStateFileName = "state.json";
inline constexpr const char* kTrainerManifestName = "trainer_manifest.json";

inline constexpr double kDefaultThetaMin = 25.0;
inline constexpr double kDefaultDeltaTheta = 10.0;
inline constexpr double kDefaultThetaTarget = 45.0;

/// Hyperparameters handed to the external LoRA trainer and sampler.
struct TrainerConfig {
  int rank = 128;
  double lr = 1e-5;
  int steps = 2000;
  double weight_decay = 0.1;
  int resolution = 512;
  int length = 81;
  double lora_weight = 0.7;
  int sampler_steps = 30;
  double guidance = 6.5;

  bool operator==(const TrainerConfig&) const = default;
};

inline json to_json(const TrainerConfig& c) {
  return {{"rank", c.rank},       {"lr", c.lr},
          {"steps", c.steps},     {"weight_decay", c.weight_decay},
          {"resolution", c.resolution}, {"length", c.length},
          {"lora_weight", c.lora_weight}, {"sampler_steps", c.sampler_steps},
          {"guidance", c.guidance}};
}

inline TrainerConfig trainer_config_from_json(const json& j, const fs::path& where) {
  using io::field;
  TrainerConfig c;
  c.rank = field<int>(j, "rank", where);
  c.lr = field<double>(j, "lr", where);
  c.steps = field<int>(j, "steps", where);
  c.weight_decay = field<double>(j, "weight_decay", where);
  c.resolution = field<int>(j, "resolution", where);
  c.length = field<int>(j, "length", where);
  c.lora_weight = field<double>(j, "lora_weight", where);
  c.sampler_steps = field<int>(j, "sampler_steps", where);
  c.guidance = field<double>(j, "guidance", where);
  if (c.resolution < 1 || c.length < 1) throw ValidationError(where.string() + ": resolution and length must be positive");
  return c;
}

enum class TrajectoryTemplate { yaw_sweep, pitch_sweep, orbit };

inline std::string_view to_string(TrajectoryTemplate t) {
  switch (t) {
    case TrajectoryTemplate::yaw_sweep: return "yaw_sweep";
    case TrajectoryTemplate::pitch_sweep: return "pitch_sweep";
    case TrajectoryTemplate::orbit: return "orbit";
  }
  return "?";
}

inline TrajectoryTemplate trajectory_template_from_string(std::string_view s) {
  if (s == "yaw_sweep") return TrajectoryTemplate::yaw_sweep;
  if (s == "pitch_sweep") return TrajectoryTemplate::pitch_sweep;
  if (s == "orbit") return TrajectoryTemplate::orbit;
  throw ValidationError("unknown trajectory template '" + std::string(s) + "'");
}

struct Stage {
  int index = 0;
  double max_angle_deg = 0.0;
  std::vector<TrajectoryTemplate> templates;

  bool operator==(const Stage&) const = default;
};

struct StagePlan {
  double theta_min = kDefaultThetaMin;
  double delta_theta = kDefaultDeltaTheta;
  double theta_target = kDefaultThetaTarget;
  std::vector<Stage> stages;
  TrainerConfig trainer;

  bool operator==(const StagePlan&) const = default;
};

/// Angle-progressive curriculum: theta_j = theta_min + j * delta_theta, up to the first
/// stage reaching theta_target.
inline StagePlan plan_stages(double theta_min = kDefaultThetaMin, double delta_theta = kDefaultDeltaTheta,
                             double theta_target = kDefaultThetaTarget, const TrainerConfig& trainer = {}) {
  if (!std::isfinite(theta_min) || !std::isfinite(delta_theta) || !std::isfinite(theta_target)) {
    throw InvalidSchedule("schedule angles must be finite");
  }
  if (!(theta_min > 0.0)) throw InvalidSchedule("theta_min must be positive");
  if (!(delta_theta > 0.0)) throw InvalidSchedule("delta_theta must be positive");
  if (theta_target < theta_min) throw InvalidSchedule("theta_target must not be below theta_min");
  if (theta_target >= 180.0) throw InvalidSchedule("theta_target must be below 180 degrees");

  const double span = (theta_target - theta_min) / delta_theta;
  const long long extra = static_cast<long long>(std::ceil(span - 1e-9));
  if (extra > 10000) throw InvalidSchedule("schedule would need more than 10000 stages");

  StagePlan plan{theta_min, delta_theta, theta_target, {}, trainer};
  for (long long j = 0; j <= extra; ++j) {
    plan.stages.push_back({int(j), theta_min + double(j) * delta_theta,
                           {TrajectoryTemplate::yaw_sweep, TrajectoryTemplate::pitch_sweep, TrajectoryTemplate::orbit}});
  }
  return plan;
}

inline json to_json(const StagePlan& plan) {
  json j;
  j["format"] = std::string(kPlanFamily) + "/1";
  j["theta_min"] = plan.theta_min;
  j["delta_theta"] = plan.delta_theta;
  j["theta_target"] = plan.theta_target;
  j["trainer"] = to_json(plan.trainer);
  j["stages"] = json::array();
  for (const Stage& s : plan.stages) {
    json templates = json::array();
    for (TrajectoryTemplate t : s.templates) templates.push_back(std::string(to_string(t)));
    j["stages"].push_back({{"index", s.index}, {"max_angle_deg", s.max_angle_deg}, {"templates", templates}});
  }
  return j;
}

/// Rebuilds the plan from its parameters and rejects files whose stage list disagrees.
inline StagePlan plan_from_json(const json& j, const fs::path& where) {
  using io::field;
  io::check_format(j, kPlanFamily, 1, where);
  StagePlan plan = plan_stages(field<double>(j, "theta_min", where), field<double>(j, "delta_theta", where),
                               field<double>(j, "theta_target", where),
                               trainer_config_from_json(field<json>(j, "trainer", where), where));
  const json stages = field<json>(j, "stages", where);
  if (!stages.is_array() || stages.size() != plan.stages.size()) {
    throw ValidationError(where.string() + ": stage list does not match the schedule parameters");
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    Stage& s = plan.stages[i];
    if (field<int>(stages[i], "index", where) != s.index ||
        std::abs(field<double>(stages[i], "max_angle_deg", where) - s.max_angle_deg) > 1e-9) {
      throw ValidationError(where.string() + ": stage " + std::to_string(i) + " disagrees with the schedule");
    }
    s.templates.clear();
    for (const auto& t : field<std::vector<std::string>>(stages[i], "templates", where)) {
      s.templates.push_back(trajectory_template_from_string(t));
    }
    if (s.templates.empty()) throw ValidationError(where.string() + ": stage without templates");
  }
  return plan;
}

inline void save_plan(const StagePlan& plan, const fs::path& path) { io::write_json(path, to_json(plan)); }
inline StagePlan load_plan(const fs::path& path) { return plan_from_json(io::read_json(path), path); }

enum class StageStatus { planned, dataset_emitted, trained, generated };

inline std::string_view to_string(StageStatus s) {
  switch (s) {
    case StageStatus::planned: return "PLANNED";
    case StageStatus::dataset_emitted: return "DATASET_EMITTED";
    case StageStatus::trained: return "TRAINED";
    case StageStatus::generated: return "GENERATED";
  }
  return "?";
}

inline StageStatus stage_status_from_string(std::string_view s) {
  if (s == "PLANNED") return StageStatus::planned;
  if (s == "DATASET_EMITTED") return StageStatus::dataset_emitted;
  if (s == "TRAINED") return StageStatus::trained;
  if (s == "GENERATED") return StageStatus::generated;
  throw ValidationError("unknown stage status '" + std::string(s) + "'");
}

/// Progress of one stage. Status only moves forward:
/// PLANNED -> DATASET_EMITTED -> TRAINED -> GENERATED.
struct StageState {
  int stage = 0;
  StageStatus status = StageStatus::planned;
  std::string dataset_dir;
  std::string trainer_manifest;
  std::string adapter_ref;  // opaque handle to the external trainer's LoRA weights
  std::vector<std::string> generated;

  bool operator==(const StageState&) const = default;
};

inline json to_json(const StageState& s) {
  return {{"format", std::string(kStageFamily) + "/1"},
          {"stage", s.stage},
          {"status", std::string(to_string(s.status))},
          {"dataset_dir", s.dataset_dir},
          {"trainer_manifest", s.trainer_manifest},
          {"adapter_ref", s.adapter_ref},
          {"generated", s.generated}};
}

inline StageState stage_state_from_json(const json& j, const fs::path& where) {
  using io::field;
  io::check_format(j, kStageFamily, 1, where);
  StageState s;
  s.stage = field<int>(j, "stage", where);
  s.status = stage_status_from_string(field<std::string>(j, "status", where));
  s.dataset_dir = field<std::string>(j, "dataset_dir", where);
  s.trainer_manifest = field<std::string>(j, "trainer_manifest", where);
  s.adapter_ref = field<std::string>(j, "adapter_ref", where);
  s.generated = field<std::vector<std::string>>(j, "generated", where);
  if (s.stage < 0) throw ValidationError(where.string() + ": negative stage index");
  if (s.status >= StageStatus::trained && s.adapter_ref.empty()) {
    throw ValidationError(where.string() + ": trained stage without adapter_ref");
  }
  if (s.status == StageStatus::generated && s.generated.empty()) {
    throw ValidationError(where.string() + ": generated stage without videos");
  }
  return s;
}

inline void save_stage_state(const StageState& s, const fs::path& path) { io::write_json(path, to_json(s)); }
inline StageState load_stage_state(const fs::path& path) { return stage_state_from_json(io::read_json(path), path); }

/// Records the external trainer's output. Requires DATASET_EMITTED.
inline StageState mark_trained(StageState state, std::string adapter_ref) {
  if (state.status != StageStatus::dataset_emitted) {
    throw StageOrderViolation("stage " + std::to_string(state.stage) + " is " + std::string(to_string(state.status)) +
                              "; training can only follow DATASET_EMITTED");
  }
  if (adapter_ref.empty()) throw ValidationError("adapter_ref must not be empty");
  state.adapter_ref = std::move(adapter_ref);
  state.status = StageStatus::trained;
  return state;
}

/// Accepts the videos generated with this stage's adapter. Each must match the plan's
/// frame count and square resolution.
inline StageState ingest_generated(StageState state, const StagePlan& plan, std::span<const io::BundleInfo> videos) {
  if (state.status != StageStatus::trained) {
    throw StageOrderViolation("stage " + std::to_string(state.stage) + " is " + std::string(to_string(state.status)) +
                              "; ingest requires TRAINED");
  }
  if (videos.empty()) throw IngestMissing("no generated videos supplied for stage " + std::to_string(state.stage));
  for (const io::BundleInfo& v : videos) {
    if (v.frame_count != plan.trainer.length) {
      throw ValidationError("frame_count mismatch: " + v.root.string() + " has " + std::to_string(v.frame_count) +
                            " frames, plan expects " + std::to_string(plan.trainer.length));
    }
    if (v.width != plan.trainer.resolution || v.height != plan.trainer.resolution) {
      throw ValidationError("resolution mismatch: " + v.root.string() + " is " + std::to_string(v.width) + "x" +
                            std::to_string(v.height) + ", plan expects " + std::to_string(plan.trainer.resolution) +
                            "x" + std::to_string(plan.trainer.resolution));
    }
  }
  state.generated.clear();
  for (const io::BundleInfo& v : videos) state.generated.push_back(fs::absolute(v.root).lexically_normal().string());
  state.status = StageStatus::generated;
  return state;
}

/// Keyframe-0-to-last sweep whose largest rotation does not exceed max_angle_deg.
/// `negative` flips the yaw/pitch sweep direction.
inline Trajectory make_stage_trajectory(TrajectoryTemplate kind, double max_angle_deg, int frame_count, bool negative,
                                        std::string name) {
  if (frame_count < 1) throw ValidationError("stage trajectory needs at least one frame");
  const double sign = negative ? -1.0 : 1.0;
  auto build = [&](double amplitude) {
    Trajectory t;
    t.name = name;
    t.frame_count = frame_count;
    t.keyframes.push_back(Keyframe{});
    if (frame_count > 1) {
      Keyframe end;
      end.index = frame_count - 1;
      switch (kind) {
        case TrajectoryTemplate::yaw_sweep: end.yaw_deg = sign * amplitude; break;
        case TrajectoryTemplate::pitch_sweep: end.pitch_deg = sign * amplitude; break;
        case TrajectoryTemplate::orbit:
          end.yaw_deg = sign * amplitude;
          end.pitch_deg = amplitude;
          break;
      }
      t.keyframes.push_back(end);
    }
    return t;
  };

  double amplitude = max_angle_deg;
  if (kind == TrajectoryTemplate::orbit) {
    // Equal yaw and pitch: bisect for the amplitude whose composed rotation hits the bound.
    double lo = 0.0, hi = max_angle_deg;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      Keyframe kf;
      kf.yaw_deg = mid;
      kf.pitch_deg = mid;
      (rad_to_deg(geodesic_angle(keyframe_orientation(kf))) <= max_angle_deg ? lo : hi) = mid;
    }
    amplitude = lo;
  }
  Trajectory t = build(amplitude);
  while (max_view_angle(t) > max_angle_deg) {
    amplitude = std::nextafter(amplitude, 0.0);
    t = build(amplitude);
  }
  return t;
}

/// A source video for stage emission: the original input at stage 0, a generated video
/// (with its re-estimated depth) afterwards.
struct SourceVideo {
  std::string name;
  CameraModel camera;
  std::vector<Frame> frames;
  std::vector<DepthFrame> depths;
};

inline SourceVideo source_from_bundle(io::VideoBundle b) {
  return {std::move(b.name), b.camera, std::move(b.frames), std::move(b.depths)};
}

struct StageSample {
  Trajectory trajectory;
  CompositeSample sample;
};

/// Seeds used for trajectory t of a stage.
inline std::uint64_t trajectory_seed(std::uint64_t seed, std::size_t t) { return derive_seed(seed, 2 * t); }
inline std::uint64_t composite_seed(std::uint64_t seed, std::size_t t) { return derive_seed(seed, 2 * t + 1); }

/// In-memory stage dataset: k trajectories cycling through the stage's templates and the
/// sources, each double-reprojected and given a composite mask. Every trajectory is
/// checked against the stage angle.
inline std::vector<StageSample> build_stage_samples(const StagePlan& plan, int j, std::span<const SourceVideo> sources,
                                                    int k_trajectories, std::uint64_t seed,
                                                    const ReprojectOptions& reproject = {},
                                                    const EditMaskConfig& edit = {}) {
  if (j < 0 || std::size_t(j) >= plan.stages.size()) {
    throw InvalidSchedule("stage " + std::to_string(j) + " is not in the plan (" + std::to_string(plan.stages.size()) +
                          " stages)");
  }
  if (k_trajectories < 1) throw ValidationError("k_trajectories must be at least 1");
  if (sources.empty()) throw IngestMissing("stage " + std::to_string(j) + " has no source videos");
  const Stage& stage = plan.stages[std::size_t(j)];
  if (stage.templates.empty()) throw InvalidSchedule("stage without trajectory templates");

  std::vector<StageSample> out;
  out.reserve(std::size_t(k_trajectories));
  for (std::size_t t = 0; t < std::size_t(k_trajectories); ++t) {
    const SourceVideo& src = sources[t % sources.size()];
    const TrajectoryTemplate tmpl = stage.templates[t % stage.templates.size()];
    Rng rng(trajectory_seed(seed, t));
    const std::string name = "stage" + std::to_string(j) + "_k" + std::to_string(t) + "_" + std::string(to_string(tmpl));
    Trajectory traj = make_stage_trajectory(tmpl, stage.max_angle_deg, int(src.frames.size()), rng.below(2) == 1, name);
    if (max_view_angle(traj) > stage.max_angle_deg) {
      throw InvalidSchedule("trajectory " + name + " exceeds its stage angle");
    }
    TrainingPair pair = double_reproject(src.frames, src.depths, src.camera, traj, reproject);
    out.push_back({std::move(traj), sample_composite(pair, edit, composite_seed(seed, t))});
  }
  return out;
}

/// Trainer-facing manifest of one stage dataset.
struct StageManifest {
  int stage = 0;
  double max_angle_deg = 0.0;
  std::vector<std::string> bundles;  // relative to the dataset directory
  std::vector<std::string> trajectories;
  std::vector<std::uint64_t> seeds;
  TrainerConfig trainer;

  bool operator==(const StageManifest&) const = default;
};

inline json to_json(const StageManifest& m) {
  return {{"format", std::string(kStageFamily) + "/1"},
          {"stage", m.stage},
          {"max_angle_deg", m.max_angle_deg},
          {"bundles", m.bundles},
          {"trajectories", m.trajectories},
          {"seeds", m.seeds},
          {"hyperparameters", to_json(m.trainer)}};
}

inline StageManifest stage_manifest_from_json(const json& j, const fs::path& where) {
  using io::field;
  io::check_format(j, kStageFamily, 1, where);
  StageManifest m;
  m.stage = field<int>(j, "stage", where);
  m.max_angle_deg = field<double>(j, "max_angle_deg", where);
  m.bundles = field<std::vector<std::string>>(j, "bundles", where);
  m.trajectories = field<std::vector<std::string>>(j, "trajectories", where);
  m.seeds = field<std::vector<std::uint64_t>>(j, "seeds", where);
  m.trainer = trainer_config_from_json(field<json>(j, "hyperparameters", where), where);
  return m;
}

struct StageEmission {
  StageManifest manifest;
  StageState state;
};

/// Checks that stage j may be emitted. Stage 0 starts from the original video; later
/// stages need the previous stage's state in GENERATED.
inline void check_stage_order(int j, const StageState* previous) {
  if (j == 0) {
    if (previous) throw StageOrderViolation("stage 0 is built from the original video, not from a previous stage");
    return;
  }
  if (!previous) {
    throw StageOrderViolation("stage " + std::to_string(j) + " needs the state of stage " + std::to_string(j - 1));
  }
  if (previous->stage != j - 1) {
    throw StageOrderViolation("stage " + std::to_string(j) + " cannot follow stage " + std::to_string(previous->stage));
  }
  if (previous->status != StageStatus::generated) {
    throw StageOrderViolation("stage " + std::to_string(j - 1) + " is " + std::string(to_string(previous->status)) +
                              "; stage " + std::to_string(j) + " requires GENERATED");
  }
}

/// Builds the stage dataset and writes it under out_dir:
///   sample_NNNNN/       composite sample bundles (plus trajectory.traj)
///   trainer_manifest.json
///   state.json          status DATASET_EMITTED
inline StageEmission emit_stage_dataset(const StagePlan& plan, int j, std::span<const SourceVideo> sources,
                                        int k_trajectories, std::uint64_t seed, const fs::path& out_dir,
                                        const StageState* previous = nullptr, const ReprojectOptions& reproject = {},
                                        const EditMaskConfig& edit = {}) {
  check_stage_order(j, previous);
  const std::vector<StageSample> samples = build_stage_samples(plan, j, sources, k_trajectories, seed, reproject, edit);

  io::ensure_dir(out_dir);
  StageEmission result;
  StageManifest& m = result.manifest;
  m.stage = j;
  m.max_angle_deg = plan.stages[std::size_t(j)].max_angle_deg;
  m.trainer = plan.trainer;
  for (std::size_t t = 0; t < samples.size(); ++t) {
    const std::string rel = io::numbered_name("sample_", t, "");
    io::store_composite_sample(samples[t].sample, out_dir / rel);
    io::write_text(out_dir / rel / "trajectory.traj", print_trajectory(samples[t].trajectory));
    m.bundles.push_back(rel);
    m.trajectories.push_back(samples[t].trajectory.name);
    m.seeds.push_back(samples[t].sample.seed);
  }
  io::write_json(out_dir / kTrainerManifestName, to_json(m));

  result.state.stage = j;
  result.state.status = StageStatus::dataset_emitted;
  result.state.dataset_dir = ".";
  result.state.trainer_manifest = kTrainerManifestName;
  save_stage_state(result.state, out_dir / kStateFileName);
  return result;
}

/// Loads the generated videos recorded in a GENERATED state as the next stage's sources.
inline std::vector<SourceVideo> load_generated_sources(const StageState& state) {
  if (state.status != StageStatus::generated) {
    throw StageOrderViolation("stage " + std::to_string(state.stage) + " has no ingested videos");
  }
  if (state.generated.empty()) throw IngestMissing("stage " + std::to_string(state.stage) + " lists no videos");
  std::vector<SourceVideo> sources;
  for (const std::string& p : state.generated) {
    try {
      sources.push_back(source_from_bundle(io::load_bundle(p)));
    } catch (const MissingFile& e) {
      throw IngestMissing(std::string("generated video unavailable: ") + e.what());
    }
  }
  return sources;
}

}  // namespace warpforge
