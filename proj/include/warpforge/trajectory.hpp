#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "warpforge/camera.hpp"
#include "warpforge/error.hpp"

namespace warpforge {

/// One user keyframe. Angles in degrees; translations in scene depth units along the
/// camera's own +X (truck), +Y (pedestal) and +Z (dolly) axes.
struct Keyframe {
  int index = 0;
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  double truck = 0.0;
  double pedestal = 0.0;
  double dolly = 0.0;

  bool operator==(const Keyframe&) const = default;
};

enum class InterpMode { slerp, linear };

struct Trajectory {
  std::string name;
  int frame_count = 0;
  std::vector<Keyframe> keyframes;
  /// Empty means "auto": the caller resolves it from the median depth of frame 0.
  std::optional<double> pivot_depth;
  InterpMode interp = InterpMode::slerp;

  bool operator==(const Trajectory&) const = default;
};

/// Throws SemanticError when the trajectory breaks an invariant.
inline void validate(const Trajectory& t) {
  if (t.frame_count <= 0) {
    throw SemanticError("trajectory '" + t.name + "': frames must be positive");
  }
  if (t.keyframes.empty()) {
    throw SemanticError("trajectory '" + t.name + "': at least one keyframe required");
  }
  if (t.keyframes.front().index != 0) {
    throw SemanticError("trajectory '" + t.name + "': first keyframe must be at index 0");
  }
  for (std::size_t i = 1; i < t.keyframes.size(); ++i) {
    if (t.keyframes[i].index <= t.keyframes[i - 1].index) {
      throw SemanticError("trajectory '" + t.name + "': keyframe indices must strictly increase");
    }
  }
  if (t.keyframes.back().index >= t.frame_count) {
    throw SemanticError("trajectory '" + t.name + "': keyframe index " +
                        std::to_string(t.keyframes.back().index) + " >= frames " +
                        std::to_string(t.frame_count));
  }
  if (t.pivot_depth && !(*t.pivot_depth > 0.0 && std::isfinite(*t.pivot_depth))) {
    throw SemanticError("trajectory '" + t.name + "': pivot must be positive");
  }
}

namespace detail {

struct Token {
  enum class Kind { word, string, number, lbrace, rbrace, end };
  Kind kind = Kind::end;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_blank();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= src_.size()) {
      return tok;
    }
    const char c = src_[pos_];
    if (c == '{' || c == '}') {
      advance();
      tok.kind = c == '{' ? Token::Kind::lbrace : Token::Kind::rbrace;
      tok.text = std::string(1, c);
      return tok;
    }
    if (c == '"') {
      advance();
      tok.kind = Token::Kind::string;
      while (true) {
        if (pos_ >= src_.size() || src_[pos_] == '\n') {
          throw SyntaxError(tok.line, tok.column, "unterminated string");
        }
        char ch = src_[pos_];
        advance();
        if (ch == '"') break;
        if (ch == '\\') {
          if (pos_ >= src_.size()) throw SyntaxError(tok.line, tok.column, "unterminated string");
          ch = src_[pos_];
          if (ch != '"' && ch != '\\') {
            throw SyntaxError(line_, column_, "unknown escape in string");
          }
          advance();
        }
        tok.text.push_back(ch);
      }
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      tok.kind = Token::Kind::number;
      while (pos_ < src_.size()) {
        const char ch = src_[pos_];
        const bool exp_sign = (ch == '-' || ch == '+') && !tok.text.empty() &&
                              (tok.text.back() == 'e' || tok.text.back() == 'E');
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == 'e' || ch == 'E' ||
            exp_sign || (tok.text.empty() && (ch == '-' || ch == '+'))) {
          tok.text.push_back(ch);
          advance();
        } else {
          break;
        }
      }
      return tok;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      tok.kind = Token::Kind::word;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        tok.text.push_back(src_[pos_]);
        advance();
      }
      return tok;
    }
    throw SyntaxError(line_, column_, std::string("unexpected character '") + c + "'");
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { bump(); }

  Trajectory parse() {
    expect_word("trajectory");
    if (tok_.kind != Token::Kind::string) fail("expected trajectory name string");
    Trajectory t;
    t.name = tok_.text;
    bump();
    expect(Token::Kind::lbrace, "'{'");
    bool have_frames = false, have_pivot = false, have_interp = false;
    while (tok_.kind != Token::Kind::rbrace) {
      if (tok_.kind != Token::Kind::word) fail("expected statement");
      const Token kw = tok_;
      bump();
      if (kw.text == "frames") {
        if (have_frames) throw SemanticError(where(kw) + "duplicate 'frames'");
        have_frames = true;
        t.frame_count = parse_int();
      } else if (kw.text == "pivot") {
        if (have_pivot) throw SemanticError(where(kw) + "duplicate 'pivot'");
        have_pivot = true;
        if (tok_.kind == Token::Kind::word && tok_.text == "auto") {
          bump();
        } else {
          t.pivot_depth = parse_float();
        }
      } else if (kw.text == "interp") {
        if (have_interp) throw SemanticError(where(kw) + "duplicate 'interp'");
        have_interp = true;
        if (tok_.kind == Token::Kind::word && tok_.text == "slerp") {
          t.interp = InterpMode::slerp;
        } else if (tok_.kind == Token::Kind::word && tok_.text == "linear") {
          t.interp = InterpMode::linear;
        } else {
          fail("expected 'slerp' or 'linear'");
        }
        bump();
      } else if (kw.text == "keyframe") {
        t.keyframes.push_back(parse_keyframe());
      } else {
        throw SyntaxError(kw.line, kw.column, "unknown keyword '" + kw.text + "'");
      }
    }
    bump();
    if (tok_.kind != Token::Kind::end) fail("trailing input after trajectory");
    validate(t);
    return t;
  }

 private:
  Keyframe parse_keyframe() {
    Keyframe kf;
    kf.index = parse_int();
    expect(Token::Kind::lbrace, "'{'");
    while (tok_.kind != Token::Kind::rbrace) {
      if (tok_.kind != Token::Kind::word) fail("expected keyframe parameter");
      const Token kw = tok_;
      bump();
      if (kw.text == "yaw" || kw.text == "pitch" || kw.text == "roll") {
        const double v = parse_float();
        expect_word("deg");
        (kw.text == "yaw" ? kf.yaw_deg : kw.text == "pitch" ? kf.pitch_deg : kf.roll_deg) = v;
      } else if (kw.text == "truck") {
        kf.truck = parse_float();
      } else if (kw.text == "pedestal") {
        kf.pedestal = parse_float();
      } else if (kw.text == "dolly") {
        kf.dolly = parse_float();
      } else {
        throw SyntaxError(kw.line, kw.column, "unknown keyframe parameter '" + kw.text + "'");
      }
    }
    bump();
    return kf;
  }

  int parse_int() {
    if (tok_.kind != Token::Kind::number) fail("expected integer");
    const std::string& s = tok_.text;
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size() || s.find_first_not_of("0123456789", start) != std::string::npos) {
      fail("expected integer, got '" + s + "'");
    }
    long long v = 0;
    try {
      v = std::stoll(s);
    } catch (const std::exception&) {
      fail("integer out of range");
    }
    if (v < -2147483647LL || v > 2147483647LL) fail("integer out of range");
    bump();
    return static_cast<int>(v);
  }

  double parse_float() {
    if (tok_.kind != Token::Kind::number) fail("expected number");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok_.text, &used);
    } catch (const std::exception&) {
      fail("malformed number '" + tok_.text + "'");
    }
    if (used != tok_.text.size() || !std::isfinite(v)) fail("malformed number '" + tok_.text + "'");
    bump();
    return v;
  }

  void expect(Token::Kind kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    bump();
  }

  void expect_word(const char* word) {
    if (tok_.kind != Token::Kind::word || tok_.text != word) fail(std::string("expected '") + word + "'");
    bump();
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(tok_.line, tok_.column, msg); }

  static std::string where(const Token& t) {
    return std::to_string(t.line) + ":" + std::to_string(t.column) + ": ";
  }

  void bump() { tok_ = lexer_.next(); }

  Lexer lexer_;
  Token tok_;
};

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// Parses the trajectory DSL:
///
///   traj  := "trajectory" STRING "{" stmt* "}"
///   stmt  := "frames" INT | "pivot" ("auto"|FLOAT) | "interp" ("slerp"|"linear") | kf
///   kf    := "keyframe" INT "{" param* "}"
///   param := ("yaw"|"pitch"|"roll") FLOAT "deg" | ("truck"|"pedestal"|"dolly") FLOAT
///
/// '#' starts a comment running to end of line.
inline Trajectory parse_trajectory(std::string_view text) { return detail::Parser(text).parse(); }

/// Canonical DSL text; parse_trajectory(print_trajectory(t)) == t.
inline std::string print_trajectory(const Trajectory& t) {
  using detail::format_real;
  std::string out = "trajectory " + detail::quote(t.name) + " {\n";
  out += "  frames " + std::to_string(t.frame_count) + "\n";
  out += "  pivot " + (t.pivot_depth ? format_real(*t.pivot_depth) : std::string("auto")) + "\n";
  out += std::string("  interp ") + (t.interp == InterpMode::slerp ? "slerp" : "linear") + "\n";
  for (const Keyframe& kf : t.keyframes) {
    out += "  keyframe " + std::to_string(kf.index) + " {";
    auto angle = [&](const char* key, double v) {
      if (v != 0.0) out += std::string(" ") + key + " " + format_real(v) + " deg";
    };
    auto shift = [&](const char* key, double v) {
      if (v != 0.0) out += std::string(" ") + key + " " + format_real(v);
    };
    angle("yaw", kf.yaw_deg);
    angle("pitch", kf.pitch_deg);
    angle("roll", kf.roll_deg);
    shift("truck", kf.truck);
    shift("pedestal", kf.pedestal);
    shift("dolly", kf.dolly);
    out += " }\n";
  }
  out += "}\n";
  return out;
}

/// Camera-to-world orientation of a keyframe: yaw about Y, then pitch about X, then
/// roll about Z, each applied in the camera's current frame.
inline Eigen::Matrix3d keyframe_orientation(const Keyframe& kf) {
  return rotation_y(deg_to_rad(kf.yaw_deg)) * rotation_x(deg_to_rad(kf.pitch_deg)) *
         rotation_z(deg_to_rad(kf.roll_deg));
}

/// Camera center of a keyframe: orbit the source center about (0,0,pivot), then shift
/// along the rotated camera axes.
inline Eigen::Vector3d keyframe_center(const Keyframe& kf, const Eigen::Matrix3d& orientation,
                                       double pivot_depth) {
  const Eigen::Vector3d pivot(0.0, 0.0, pivot_depth);
  return pivot + orientation * (-pivot) + orientation * Eigen::Vector3d(kf.truck, kf.pedestal, kf.dolly);
}

inline Pose keyframe_pose(const Keyframe& kf, double pivot_depth) {
  const Eigen::Matrix3d orientation = keyframe_orientation(kf);
  return Pose::from_camera(orientation, keyframe_center(kf, orientation, pivot_depth));
}

/// Compiles a trajectory to frame_count world-to-camera poses. The explicit pivot of the
/// trajectory wins over `pivot_depth`; the latter resolves "pivot auto".
inline std::vector<Pose> sample_poses(const Trajectory& traj, double pivot_depth) {
  validate(traj);
  const double pivot = traj.pivot_depth.value_or(pivot_depth);
  if (!(pivot > 0.0) || !std::isfinite(pivot)) {
    throw SemanticError("sample_poses: pivot depth must be positive");
  }

  struct Key {
    Eigen::Matrix3d orientation;
    Eigen::Quaterniond rotation;
    Eigen::Vector3d center;
    Pose pose;
  };
  std::vector<Key> keys;
  keys.reserve(traj.keyframes.size());
  for (const Keyframe& kf : traj.keyframes) {
    Key k;
    k.orientation = keyframe_orientation(kf);
    k.rotation = Eigen::Quaterniond(k.orientation).normalized();
    k.center = keyframe_center(kf, k.orientation, pivot);
    k.pose = Pose::from_camera(k.orientation, k.center);
    keys.push_back(k);
  }

  std::vector<Pose> poses(static_cast<std::size_t>(traj.frame_count));
  std::size_t seg = 0;
  for (int f = 0; f < traj.frame_count; ++f) {
    while (seg + 1 < keys.size() && traj.keyframes[seg + 1].index <= f) ++seg;
    const Keyframe& ka = traj.keyframes[seg];
    if (f == ka.index || seg + 1 == keys.size()) {
      poses[static_cast<std::size_t>(f)] = keys[seg].pose;
      continue;
    }
    const Keyframe& kb = traj.keyframes[seg + 1];
    const double t = static_cast<double>(f - ka.index) / static_cast<double>(kb.index - ka.index);
    if (traj.interp == InterpMode::linear) {
      auto lerp = [t](double a, double b) { return a + t * (b - a); };
      Keyframe mid;
      mid.yaw_deg = lerp(ka.yaw_deg, kb.yaw_deg);
      mid.pitch_deg = lerp(ka.pitch_deg, kb.pitch_deg);
      mid.roll_deg = lerp(ka.roll_deg, kb.roll_deg);
      mid.truck = lerp(ka.truck, kb.truck);
      mid.pedestal = lerp(ka.pedestal, kb.pedestal);
      mid.dolly = lerp(ka.dolly, kb.dolly);
      poses[static_cast<std::size_t>(f)] = keyframe_pose(mid, pivot);
    } else {
      const Eigen::Quaterniond q = slerp(keys[seg].rotation, keys[seg + 1].rotation, t);
      const Eigen::Vector3d c = (1.0 - t) * keys[seg].center + t * keys[seg + 1].center;
      poses[static_cast<std::size_t>(f)] = Pose::from_camera(q.toRotationMatrix(), c);
    }
  }
  return poses;
}

/// Largest geodesic rotation angle (degrees) of any frame relative to the source view.
/// Rotations do not depend on the pivot, so none is needed.
inline double max_view_angle(const Trajectory& traj) {
  const std::vector<Pose> poses = sample_poses(traj, traj.pivot_depth.value_or(1.0));
  double best = 0.0;
  for (const Pose& p : poses) best = std::max(best, geodesic_angle(p.rotation));
  return rad_to_deg(best);
}

}  // namespace warpforge
