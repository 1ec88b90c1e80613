#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "warpforge/io/bundle.hpp"
#include "warpforge/maskgen.hpp"
#include "warpforge/packing.hpp"
#include "warpforge/reprojection.hpp"

namespace warpforge::io {

inline constexpr const char* kPairFamily = "fyc-pair";
inline constexpr const char* kSampleFamily = "fyc-sample";
inline constexpr const char* kPackFamily = "fyc-pack";
inline constexpr const char* kPackManifestName = "pack.json";

namespace detail {

inline void write_frames(const fs::path& dir, const std::vector<Frame>& frames) {
  reset_dir(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) write_frame(dir / numbered_name("f_", i, ".png"), frames[i]);
}

inline void write_masks(const fs::path& dir, const std::vector<Mask>& masks) {
  reset_dir(dir);
  for (std::size_t i = 0; i < masks.size(); ++i) write_mask(dir / numbered_name("m_", i, ".png"), masks[i]);
}

inline std::vector<Frame> read_frames(const fs::path& dir, int n, int w, int h) {
  check_sequence(dir, "f_", ".png", n);
  std::vector<Frame> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const fs::path p = dir / numbered_name("f_", std::size_t(i), ".png");
    out[std::size_t(i)] = read_frame(p);
    if (out[std::size_t(i)].width != w || out[std::size_t(i)].height != h) {
      throw ManifestMismatch(p.string() + ": dimensions differ from manifest");
    }
  }
  return out;
}

inline std::vector<Mask> read_masks(const fs::path& dir, int n, int w, int h) {
  check_sequence(dir, "m_", ".png", n);
  std::vector<Mask> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const fs::path p = dir / numbered_name("m_", std::size_t(i), ".png");
    out[std::size_t(i)] = read_mask(p);
    if (out[std::size_t(i)].width != w || out[std::size_t(i)].height != h) {
      throw ManifestMismatch(p.string() + ": dimensions differ from manifest");
    }
  }
  return out;
}

inline void check_pair(const TrainingPair& pair) {
  const std::size_t n = pair.clean.size();
  if (n == 0 || pair.corrupted.size() != n || pair.inpaint_mask.size() != n) {
    throw LengthMismatch("training pair sequences must be non-empty and equally long");
  }
  const int w = pair.clean.front().width, h = pair.clean.front().height;
  for (std::size_t i = 0; i < n; ++i) {
    if (pair.clean[i].width != w || pair.clean[i].height != h || pair.corrupted[i].width != w ||
        pair.corrupted[i].height != h || pair.inpaint_mask[i].width != w || pair.inpaint_mask[i].height != h) {
      throw DimensionMismatch("training pair frame " + std::to_string(i) + " has different dimensions");
    }
  }
}

inline json pair_fields(const TrainingPair& pair) {
  json j;
  j["frame_count"] = pair.clean.size();
  j["width"] = pair.clean.front().width;
  j["height"] = pair.clean.front().height;
  j["trajectory"] = {{"name", pair.trajectory_ref.name}, {"max_angle_deg", pair.trajectory_ref.max_angle_deg}};
  j["mask_semantics"] = "inpaint";
  return j;
}

inline void write_pair_payload(const TrainingPair& pair, const fs::path& dir) {
  write_frames(dir / "corrupted", pair.corrupted);
  write_masks(dir / "masks", pair.inpaint_mask);
  write_frames(dir / "clean", pair.clean);
}

inline TrainingPair read_pair_payload(const json& j, const fs::path& dir, const fs::path& mpath) {
  const int n = field<int>(j, "frame_count", mpath);
  const int w = field<int>(j, "width", mpath);
  const int h = field<int>(j, "height", mpath);
  if (n < 1 || w < 1 || h < 1) throw ValidationError(mpath.string() + ": sizes must be positive");
  if (field<std::string>(j, "mask_semantics", mpath) != "inpaint") {
    throw ValidationError(mpath.string() + ": mask_semantics must be \"inpaint\"");
  }
  const json traj = field<json>(j, "trajectory", mpath);
  TrainingPair pair;
  pair.trajectory_ref = {field<std::string>(traj, "name", mpath), field<double>(traj, "max_angle_deg", mpath)};
  pair.corrupted = read_frames(dir / "corrupted", n, w, h);
  pair.inpaint_mask = read_masks(dir / "masks", n, w, h);
  pair.clean = read_frames(dir / "clean", n, w, h);
  return pair;
}

}  // namespace detail

/// Layout: manifest.json ("fyc-pair/1"), corrupted/f_*.png, masks/m_*.png, clean/f_*.png.
inline fs::path store_training_pair(const TrainingPair& pair, const fs::path& dir) {
  detail::check_pair(pair);
  ensure_dir(dir);
  detail::write_pair_payload(pair, dir);
  json j = detail::pair_fields(pair);
  j["format"] = std::string(kPairFamily) + "/1";
  const fs::path mpath = dir / kManifestName;
  write_json(mpath, j);
  return mpath;
}

inline TrainingPair load_training_pair(const fs::path& dir) {
  const fs::path mpath = dir / kManifestName;
  const json j = read_json(mpath);
  check_format(j, kPairFamily, 1, mpath);
  return detail::read_pair_payload(j, dir, mpath);
}

/// A pair directory plus sample_mask/m_*.png and the drawn kind and seed.
inline fs::path store_composite_sample(const CompositeSample& s, const fs::path& dir) {
  detail::check_pair(s.pair);
  if (s.mask.frames.size() != s.pair.clean.size()) throw LengthMismatch("sample mask length differs from pair");
  ensure_dir(dir);
  detail::write_pair_payload(s.pair, dir);
  detail::write_masks(dir / "sample_mask", s.mask.frames);
  json j = detail::pair_fields(s.pair);
  j["format"] = std::string(kSampleFamily) + "/1";
  j["kind"] = std::string(to_string(s.kind));
  j["mask_kind"] = std::string(to_string(s.mask.kind));
  j["seed"] = s.seed;
  const fs::path mpath = dir / kManifestName;
  write_json(mpath, j);
  return mpath;
}

inline CompositeSample load_composite_sample(const fs::path& dir) {
  const fs::path mpath = dir / kManifestName;
  const json j = read_json(mpath);
  check_format(j, kSampleFamily, 1, mpath);
  CompositeSample s;
  s.pair = detail::read_pair_payload(j, dir, mpath);
  s.kind = mask_kind_from_string(field<std::string>(j, "kind", mpath));
  s.seed = field<std::uint64_t>(j, "seed", mpath);
  s.mask.kind = mask_kind_from_string(field<std::string>(j, "mask_kind", mpath));
  const Frame& f = s.pair.clean.front();
  s.mask.frames = detail::read_masks(dir / "sample_mask", int(s.pair.clean.size()), f.width, f.height);
  return s;
}

/// Layout: pack.json ("fyc-pack/1"), context/f_*.png, hole/f_*.png, hole_masks/m_*.png.
/// Paths in pack.json are relative to the pack directory.
inline fs::path store_packed_sequence(const PackedSequence& p, const fs::path& dir) {
  if (p.context_frames.size() != std::size_t(p.manifest.k) || p.manifest.selected.size() != std::size_t(p.manifest.k)) {
    throw LengthMismatch("packed sequence: context frame count must equal k");
  }
  if (p.hole_video.empty() || p.hole_video.size() != p.hole_mask.size()) {
    throw LengthMismatch("packed sequence: hole video and masks must be non-empty and equally long");
  }
  ensure_dir(dir);
  detail::write_frames(dir / "context", p.context_frames);
  detail::write_frames(dir / "hole", p.hole_video);
  detail::write_masks(dir / "hole_masks", p.hole_mask);

  json j;
  j["format"] = std::string(kPackFamily) + "/1";
  j["k"] = p.manifest.k;
  j["selected"] = p.manifest.selected;
  j["source"] = p.manifest.source;
  j["hole_source"] = p.manifest.hole_source;
  j["context_frames"] = json::array();
  j["hole_frames"] = json::array();
  j["hole_masks"] = json::array();
  for (std::size_t i = 0; i < p.context_frames.size(); ++i) {
    j["context_frames"].push_back("context/" + numbered_name("f_", i, ".png"));
  }
  for (std::size_t i = 0; i < p.hole_video.size(); ++i) {
    j["hole_frames"].push_back("hole/" + numbered_name("f_", i, ".png"));
    j["hole_masks"].push_back("hole_masks/" + numbered_name("m_", i, ".png"));
  }
  const fs::path mpath = dir / kPackManifestName;
  write_json(mpath, j);
  return mpath;
}

inline PackedSequence load_packed_sequence(const fs::path& dir) {
  const fs::path mpath = dir / kPackManifestName;
  const json j = read_json(mpath);
  check_format(j, kPackFamily, 1, mpath);
  PackedSequence p;
  p.manifest.k = field<int>(j, "k", mpath);
  p.manifest.selected = field<std::vector<int>>(j, "selected", mpath);
  p.manifest.source = field<std::string>(j, "source", mpath);
  p.manifest.hole_source = j.contains("hole_source") ? field<std::string>(j, "hole_source", mpath) : std::string();
  if (p.manifest.k < 1 || p.manifest.selected.size() != std::size_t(p.manifest.k) ||
      !std::is_sorted(p.manifest.selected.begin(), p.manifest.selected.end()) ||
      std::adjacent_find(p.manifest.selected.begin(), p.manifest.selected.end()) != p.manifest.selected.end()) {
    throw ManifestMismatch(mpath.string() + ": \"selected\" must hold k strictly ascending indices");
  }
  const auto context = field<std::vector<std::string>>(j, "context_frames", mpath);
  const auto holes = field<std::vector<std::string>>(j, "hole_frames", mpath);
  const auto hole_masks = field<std::vector<std::string>>(j, "hole_masks", mpath);
  if (context.size() != std::size_t(p.manifest.k) || holes.empty() || holes.size() != hole_masks.size()) {
    throw ManifestMismatch(mpath.string() + ": frame lists disagree with k or with each other");
  }
  for (const auto& rel : context) p.context_frames.push_back(read_frame(dir / rel));
  for (const auto& rel : holes) p.hole_video.push_back(read_frame(dir / rel));
  for (const auto& rel : hole_masks) p.hole_mask.push_back(read_mask(dir / rel));
  const int w = p.hole_video.front().width, h = p.hole_video.front().height;
  auto same = [&](int fw, int fh) { return fw == w && fh == h; };
  for (const auto& f : p.context_frames) {
    if (!same(f.width, f.height)) throw ManifestMismatch(mpath.string() + ": context frame size differs");
  }
  for (std::size_t i = 0; i < p.hole_video.size(); ++i) {
    if (!same(p.hole_video[i].width, p.hole_video[i].height) || !same(p.hole_mask[i].width, p.hole_mask[i].height)) {
      throw ManifestMismatch(mpath.string() + ": hole frame size differs");
    }
  }
  return p;
}

}  // namespace warpforge::io
