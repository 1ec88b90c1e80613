#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "warpforge/error.hpp"

namespace warpforge::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Serialized form used for every manifest: sorted keys, two-space indent, trailing newline.
inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw MissingFile("missing file " + path.string());
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_json(const fs::path& path, const json& j) { write_text(path, dump_json(j)); }

inline json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": malformed JSON: " + e.what());
  }
}

/// Checks a "format": "<family>/<version>" tag.
inline void check_format(const json& j, std::string_view family, int version, const fs::path& where) {
  const auto it = j.find("format");
  if (!j.is_object() || it == j.end() || !it->is_string()) {
    throw BadMagic(where.string() + ": missing \"format\" tag");
  }
  const std::string tag = it->get<std::string>();
  const std::string prefix = std::string(family) + "/";
  if (tag.rfind(prefix, 0) != 0) {
    throw BadMagic(where.string() + ": expected format " + prefix + "*, got \"" + tag + "\"");
  }
  if (tag != prefix + std::to_string(version)) {
    throw UnsupportedVersion(where.string() + ": unsupported format version \"" + tag + "\"");
  }
}

/// Typed field access; missing or mistyped fields surface as ValidationError.
template <typename T>
T field(const json& j, const char* key, const fs::path& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where.string() + ": missing field \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where.string() + ": field \"" + key + "\" has the wrong type");
  }
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

/// Creates `dir` empty. Only used for subdirectories this library owns inside an
/// artifact directory.
inline void reset_dir(const fs::path& dir) {
  std::error_code ec;
  fs::remove_all(dir, ec);
  ensure_dir(dir);
}

}  // namespace warpforge::io
