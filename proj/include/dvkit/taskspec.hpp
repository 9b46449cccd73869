#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dvkit/error.hpp"

namespace dvkit::taskspec {

/// Axis-aligned table-top box (x0, y0)-(x1, y1) in meters, robot base frame.
struct Box2 {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(double x, double y) const {
    return x0 <= x && x <= x1 && y0 <= y && y <= y1;
  }
  bool operator==(const Box2&) const = default;
};

/// Union of boxes. Overlaps are allowed.
struct SpatialRegion {
  std::vector<Box2> boxes;

  /// Sum of per-box areas; overlaps count twice. This is the sampling weight.
  double raw_area() const;
  bool contains(double x, double y) const;
  bool operator==(const SpatialRegion&) const = default;
};

/// One spherical window about the table center: radius in meters, polar and
/// azimuth angles in degrees (physics convention).
struct CameraRange {
  double r_min = 0, r_max = 0;
  double theta_min = 0, theta_max = 0;
  double phi_min = 0, phi_max = 0;
  bool operator==(const CameraRange&) const = default;
};

struct CameraPoseRange {
  std::vector<CameraRange> ranges;
  bool operator==(const CameraPoseRange&) const = default;
};

enum class TextureMode { kFractal, kJitter };

/// HSV bounds. In fractal mode these are absolute (H in [0,1], wrapping when
/// h_min > h_max). In jitter mode they are offsets in [-1,1] applied to the
/// named base texture.
struct TextureSpec {
  TextureMode mode = TextureMode::kFractal;
  std::optional<std::string> base_name;
  double h_min = 0, h_max = 0;
  double s_min = 0, s_max = 0;
  double v_min = 0, v_max = 0;

  bool hue_wraps() const { return mode == TextureMode::kFractal && h_min > h_max; }
  bool operator==(const TextureSpec&) const = default;
};

enum class PrimitiveKind {
  kPick,
  kPlace,
  kPush,
  kPull,
  kOpen,
  kClose,
  kPlaceBin,
  kPickPlaceTopDrawer,
  kPickPlaceBasket,
  kCustom,
};

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kPick;
  std::string label;  // only for kCustom

  /// Keyword as written in the spec language, or the custom label.
  std::string name() const;
  bool operator==(const Primitive&) const = default;
};

/// Parses a bare primitive keyword ("pick", "placeBin", ...).
std::optional<PrimitiveKind> primitive_from_name(std::string_view name);

struct PredicateSequence {
  std::vector<Primitive> primitives;
  bool operator==(const PredicateSequence&) const = default;
};

struct TaskSpec {
  std::string name;
  std::string lab;
  PredicateSequence goal;
  std::string object_name;
  TextureSpec object_texture;
  SpatialRegion object_region;
  std::optional<std::string> receptacle_name;
  std::optional<SpatialRegion> receptacle_region;
  CameraPoseRange camera_range;
  TextureSpec table_texture;
  std::string instruction;

  bool operator==(const TaskSpec&) const = default;
};

struct Vec2 {
  double x = 0, y = 0;
  bool operator==(const Vec2&) const = default;
};

struct SphericalPose {
  double r = 0, theta = 0, phi = 0;
  bool operator==(const SphericalPose&) const = default;
};

struct Hsv {
  double h = 0, s = 0, v = 0;
  bool operator==(const Hsv&) const = default;
};

/// A concrete draw from a TaskSpec. For a jitter texture the stored HSV is
/// the sampled offset, not an absolute color.
struct TaskInstance {
  std::string spec_name;
  Vec2 object_pose;
  std::optional<Vec2> receptacle_pose;
  SphericalPose camera_pose;
  Hsv object_hsv;
  Hsv table_hsv;
  std::uint64_t seed = 0;

  bool operator==(const TaskInstance&) const = default;
};

class DegenerateRegion : public Error {
 public:
  explicit DegenerateRegion(const std::string& what)
      : Error("DegenerateRegion", what) {}
};

/// Parses one `(task ...)` form. Throws SyntaxError (with line/column) for
/// grammar problems and RangeError (with the field name, and the position of
/// the offending form) when a numeric invariant fails.
TaskSpec parse(std::string_view source);

/// Checks every invariant of an already-built spec; throws RangeError.
void validate(const TaskSpec& spec);

/// Canonical text. parse(serialize(s)) == s for every valid s.
std::string serialize(const TaskSpec& spec);

/// Deterministic draw for `seed`. Boxes are chosen proportionally to raw
/// area and sampled uniformly inside; a camera range is chosen uniformly by
/// index and sampled uniformly per coordinate; HSV is uniform within bounds
/// (hue wraps through 1 -> 0 when h_min > h_max).
TaskInstance sample_instance(const TaskSpec& spec, std::uint64_t seed);

/// Hue membership with wrap: [lo, hi] when lo <= hi, else [lo,1) U [0,hi].
bool hue_in_range(double h, double lo, double hi);

/// True iff every sampled value of `inst` lies inside the ranges of `spec`.
bool instance_within(const TaskSpec& spec, const TaskInstance& inst);

}  // namespace dvkit::taskspec
