#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "warpforge/camera.hpp"
#include "warpforge/error.hpp"
#include "warpforge/image.hpp"
#include "warpforge/io/formats.hpp"
#include "warpforge/io/json_util.hpp"
#include "warpforge/parallel.hpp"

namespace warpforge::io {

inline constexpr const char* kBundleFamily = "fyc-bundle";
inline constexpr const char* kManifestName = "manifest.json";

enum class DepthEncoding { dpt1, png16 };

/// Frames, depths and optional inpaint masks of one video plus its camera.
///
/// On disk:
///   manifest.json          {"format":"fyc-bundle/1", ...}
///   frames/f_NNNNN.png     8-bit RGB
///   depths/d_NNNNN.dpt     DPT1, or d_NNNNN.png for png16
///   masks/m_NNNNN.png      optional, 255 = fill
struct VideoBundle {
  std::string name;
  CameraModel camera;
  std::vector<Frame> frames;
  std::vector<DepthFrame> depths;
  std::optional<std::vector<Mask>> masks;
  DepthEncoding depth_encoding = DepthEncoding::dpt1;
  Png16DepthCoding png16;

  bool operator==(const VideoBundle& o) const {
    return name == o.name && camera == o.camera && frames == o.frames && depths == o.depths && masks == o.masks;
  }
};

/// Manifest-level view of a bundle; file presence and counts are checked, pixels are not.
struct BundleInfo {
  fs::path root;
  std::string name;
  int frame_count = 0;
  int width = 0;
  int height = 0;
  CameraModel camera;
  DepthEncoding depth_encoding = DepthEncoding::dpt1;
  Png16DepthCoding png16;
  bool has_masks = false;
};

namespace detail {

inline std::string depth_file_name(std::size_t i, DepthEncoding enc) {
  return numbered_name("d_", i, enc == DepthEncoding::dpt1 ? ".dpt" : ".png");
}

/// Requires dir to hold exactly names prefix00000ext .. prefix{n-1}ext among files with
/// that prefix and extension.
inline void check_sequence(const fs::path& dir, const std::string& prefix, const std::string& ext, int n) {
  if (!fs::is_directory(dir)) throw MissingFile("missing directory " + dir.string());
  int found = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string fname = entry.path().filename().string();
    if (fname.rfind(prefix, 0) == 0 && entry.path().extension() == ext) ++found;
  }
  if (found != n) {
    throw ManifestMismatch(dir.string() + ": manifest declares " + std::to_string(n) + " files, found " +
                           std::to_string(found));
  }
  for (int i = 0; i < n; ++i) {
    if (!fs::exists(dir / numbered_name(prefix, std::size_t(i), ext))) {
      throw ManifestMismatch(dir.string() + ": missing " + numbered_name(prefix, std::size_t(i), ext));
    }
  }
}

inline json camera_to_json(const CameraModel& c) {
  return {{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"width", c.width}, {"height", c.height}};
}

inline CameraModel camera_from_json(const json& j, const fs::path& where) {
  if (!j.is_object()) throw ValidationError(where.string() + ": camera must be an object");
  CameraModel c{field<double>(j, "fx", where), field<double>(j, "fy", where), field<double>(j, "cx", where),
                field<double>(j, "cy", where), field<int>(j, "width", where),  field<int>(j, "height", where)};
  c.validate();
  return c;
}

}  // namespace detail

inline BundleInfo inspect_bundle(const fs::path& root) {
  const fs::path mpath = root / kManifestName;
  const json j = read_json(mpath);
  check_format(j, kBundleFamily, 1, mpath);
  BundleInfo info;
  info.root = root;
  info.name = j.contains("name") ? field<std::string>(j, "name", mpath) : root.filename().string();
  info.frame_count = field<int>(j, "frame_count", mpath);
  info.width = field<int>(j, "width", mpath);
  info.height = field<int>(j, "height", mpath);
  if (info.frame_count < 1 || info.width < 1 || info.height < 1) {
    throw ValidationError(mpath.string() + ": frame_count, width and height must be positive");
  }
  info.camera = detail::camera_from_json(field<json>(j, "camera", mpath), mpath);
  if (info.camera.width != info.width || info.camera.height != info.height) {
    throw ManifestMismatch(mpath.string() + ": camera size differs from bundle size");
  }
  const std::string enc = field<std::string>(j, "depth_encoding", mpath);
  if (enc == "dpt1") {
    info.depth_encoding = DepthEncoding::dpt1;
  } else if (enc == "png16") {
    info.depth_encoding = DepthEncoding::png16;
    info.png16 = {field<double>(j, "depth_scale", mpath), field<double>(j, "depth_offset", mpath)};
    if (!(info.png16.scale > 0.0)) throw ValidationError(mpath.string() + ": depth_scale must be positive");
  } else {
    throw ValidationError(mpath.string() + ": unknown depth_encoding \"" + enc + "\"");
  }
  info.has_masks = j.contains("masks") && field<bool>(j, "masks", mpath);
  if (info.has_masks && field<std::string>(j, "mask_semantics", mpath) != "inpaint") {
    throw ValidationError(mpath.string() + ": mask_semantics must be \"inpaint\"");
  }

  detail::check_sequence(root / "frames", "f_", ".png", info.frame_count);
  detail::check_sequence(root / "depths", "d_", info.depth_encoding == DepthEncoding::dpt1 ? ".dpt" : ".png",
                         info.frame_count);
  if (info.has_masks) detail::check_sequence(root / "masks", "m_", ".png", info.frame_count);
  return info;
}

/// Loads and fully validates a bundle: manifest, file counts, magic numbers and that every
/// image matches the declared size.
inline VideoBundle load_bundle(const fs::path& root, unsigned threads = 0) {
  const BundleInfo info = inspect_bundle(root);
  VideoBundle b;
  b.name = info.name;
  b.camera = info.camera;
  b.depth_encoding = info.depth_encoding;
  b.png16 = info.png16;
  const std::size_t n = std::size_t(info.frame_count);
  b.frames.resize(n);
  b.depths.resize(n);
  if (info.has_masks) b.masks.emplace(n);

  auto check_dims = [&](const fs::path& p, int w, int h) {
    if (w != info.width || h != info.height) {
      throw ManifestMismatch(p.string() + " is " + std::to_string(w) + "x" + std::to_string(h) + ", manifest says " +
                             std::to_string(info.width) + "x" + std::to_string(info.height));
    }
  };
  parallel_for(
      n,
      [&](std::size_t i) {
        const fs::path fp = root / "frames" / numbered_name("f_", i, ".png");
        b.frames[i] = read_frame(fp);
        check_dims(fp, b.frames[i].width, b.frames[i].height);
        const fs::path dp = root / "depths" / detail::depth_file_name(i, info.depth_encoding);
        b.depths[i] = info.depth_encoding == DepthEncoding::dpt1 ? read_depth_dpt1(dp) : read_depth_png16(dp, info.png16);
        check_dims(dp, b.depths[i].width, b.depths[i].height);
        if (b.masks) {
          const fs::path mp = root / "masks" / numbered_name("m_", i, ".png");
          (*b.masks)[i] = read_mask(mp);
          check_dims(mp, (*b.masks)[i].width, (*b.masks)[i].height);
        }
      },
      threads);
  return b;
}

/// Writes a bundle and returns the manifest path.
inline fs::path store_bundle(const VideoBundle& b, const fs::path& root) {
  if (b.frames.empty() || b.frames.size() != b.depths.size() || (b.masks && b.masks->size() != b.frames.size())) {
    throw LengthMismatch("store_bundle: frames, depths and masks must be non-empty and equally long");
  }
  const int w = b.frames.front().width, h = b.frames.front().height;
  for (std::size_t i = 0; i < b.frames.size(); ++i) {
    const bool ok = b.frames[i].width == w && b.frames[i].height == h && b.depths[i].width == w &&
                    b.depths[i].height == h && (!b.masks || ((*b.masks)[i].width == w && (*b.masks)[i].height == h));
    if (!ok) throw DimensionMismatch("store_bundle: frame " + std::to_string(i) + " has different dimensions");
  }
  if (b.camera.width != w || b.camera.height != h) throw DimensionMismatch("store_bundle: camera size differs");

  ensure_dir(root);
  reset_dir(root / "frames");
  reset_dir(root / "depths");
  if (b.masks) reset_dir(root / "masks");
  for (std::size_t i = 0; i < b.frames.size(); ++i) {
    write_frame(root / "frames" / numbered_name("f_", i, ".png"), b.frames[i]);
    const fs::path dp = root / "depths" / detail::depth_file_name(i, b.depth_encoding);
    if (b.depth_encoding == DepthEncoding::dpt1) {
      write_depth_dpt1(dp, b.depths[i]);
    } else {
      write_depth_png16(dp, b.depths[i], b.png16);
    }
    if (b.masks) write_mask(root / "masks" / numbered_name("m_", i, ".png"), (*b.masks)[i]);
  }

  json j;
  j["format"] = std::string(kBundleFamily) + "/1";
  j["name"] = b.name;
  j["frame_count"] = b.frames.size();
  j["width"] = w;
  j["height"] = h;
  j["camera"] = detail::camera_to_json(b.camera);
  j["depth_encoding"] = b.depth_encoding == DepthEncoding::dpt1 ? "dpt1" : "png16";
  if (b.depth_encoding == DepthEncoding::png16) {
    j["depth_scale"] = b.png16.scale;
    j["depth_offset"] = b.png16.offset;
  }
  j["masks"] = b.masks.has_value();
  j["mask_semantics"] = "inpaint";
  const fs::path mpath = root / kManifestName;
  write_json(mpath, j);
  return mpath;
}

}  // namespace warpforge::io
