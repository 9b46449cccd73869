#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvkit/error.hpp"
#include "dvkit/metadata.hpp"
#include "dvkit/taskspec.hpp"

namespace dvkit::genkit {

// ---------------------------------------------------------------------------
// Fractal textures

inline constexpr int kNoiseOctaves = 4;
inline constexpr double kNoisePersistence = 0.5;
/// Lattice cells across the raster at the first octave.
inline constexpr int kNoiseBaseCells = 4;

struct TextureRaster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<taskspec::Hsv> pixels;  // row-major

  const taskspec::Hsv& at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  bool operator==(const TextureRaster&) const = default;
};

/// Value noise in [0, 1] at (x, y) in lattice units of the first octave.
double fractal_noise(double x, double y, std::uint64_t seed);

/// Sums value-noise octaves, normalizes to [0, 1] and maps each HSV channel
/// affinely into the spec bounds (hue wraps through 1 -> 0 when h_min >
/// h_max). Each channel gets its own noise field. Throws RangeError for a
/// jitter spec or an empty raster.
TextureRaster fractal_texture(const taskspec::TextureSpec& spec, std::size_t width,
                              std::size_t height, std::uint64_t seed);

bool raster_within(const taskspec::TextureSpec& spec, const TextureRaster& raster);

/// Binary raster: magic "DVTX", width and height as little-endian uint32,
/// then H, S, V as little-endian float32 per pixel, row-major.
void write_raster(std::ostream& os, const TextureRaster& raster);
TextureRaster read_raster(std::istream& is);

/// Binary PPM (P6) of the raster converted to RGB.
void write_ppm(std::ostream& os, const TextureRaster& raster);

// ---------------------------------------------------------------------------
// Task-instance enumeration

inline constexpr std::size_t kObjectsPerLab = 7;
inline constexpr std::size_t kOpenablesPerLab = 2;
inline constexpr std::size_t kCameraBinsPerLab = 5;
inline constexpr std::size_t kDefaultSpatialCombinations = 90;

struct LabConfig {
  std::string id;
  std::vector<std::string> objects;     // 7
  std::vector<std::string> openables;   // 2: a drawer and a microwave
  bool has_stove = true;
  bool has_coffee_machine = false;
  std::vector<std::string> camera_bins; // 5
  std::size_t spatial_combinations = kDefaultSpatialCombinations;

  /// Throws Error("ConfigError") when a roster has the wrong size.
  void validate() const;

  /// Eight labs; only the fifth has a coffee machine.
  static std::vector<LabConfig> defaults();
};

struct TaskDescriptor {
  std::string lab;
  std::string template_name;
  std::string instruction;
  taskspec::PredicateSequence goal;
  std::optional<std::string> object;
  std::optional<std::string> receptacle;
};

struct LabEnumeration {
  std::string lab;
  std::vector<TaskDescriptor> tasks;
  std::map<std::string, std::size_t> template_counts;
  /// camera bins x spatial combinations.
  std::size_t variations = 0;
};

struct Enumeration {
  std::vector<LabEnumeration> labs;
  std::size_t total_tasks = 0;
  std::size_t total_variations = 0;
};

/// Template names in enumeration order.
const std::vector<std::string>& template_names();

/// Pure function of the configs.
Enumeration enumerate_instances(std::span<const LabConfig> labs);

std::string enumeration_text(const Enumeration& e);
std::string enumeration_json(const Enumeration& e);

// ---------------------------------------------------------------------------
// Segment decomposition and synthesis

struct RigidPose {
  metadata::Vec3 pos;
  metadata::Quat quat;
  bool operator==(const RigidPose&) const = default;
};

struct Segment {
  RigidPose object_anchor;
  std::vector<metadata::Step> steps;
  std::string primitive;
  std::size_t first_step = 0;  // index in the source demo
};

class SegmentationMismatch : public Error {
 public:
  SegmentationMismatch(std::size_t transitions, std::size_t primitives)
      : Error("SegmentationMismatch", std::to_string(transitions) + " gripper transitions but " +
                                          std::to_string(primitives) + " primitives") {}
};

class DegenerateAnchor : public Error {
 public:
  explicit DegenerateAnchor(const std::string& what) : Error("DegenerateAnchor", what) {}
};

/// Splits at the smoothed gripper transitions. The step of each transition
/// closes the current segment; the next segment starts one step later, and
/// the last segment runs to the end of the demo. A segment's anchor is the
/// end-effector pose at its transition step.
std::vector<Segment> decompose(const metadata::DemoRecord& demo,
                               const taskspec::PredicateSequence& goal);

/// Maps every step of segment i by new_anchors[i] * old_anchor_i^-1 and
/// joins consecutive segments. A junction whose mapped gap exceeds both
/// `bridge_step` and its gap in the source is filled with interpolated
/// steps (linear position, slerp orientation, gripper held) spaced at most
/// `bridge_step` apart. Timestamps are renumbered from 0. Metadata other
/// than steps is copied from `base`; annotations are dropped.
metadata::DemoRecord synthesize(std::span<const Segment> segments,
                                std::span<const RigidPose> new_anchors, double bridge_step,
                                const metadata::DemoRecord& base = {});

/// a * b as rigid transforms.
RigidPose compose(const RigidPose& a, const RigidPose& b);
RigidPose inverse(const RigidPose& a);

}  // namespace dvkit::genkit
