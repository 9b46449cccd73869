#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dvkit/error.hpp"
#include "dvkit/metadata.hpp"

namespace dvkit::dvalgebra {

enum class SupportKind { kInterval2d, kInterval3d, kAngular, kDiscrete };

std::string_view kind_name(SupportKind k);
std::optional<SupportKind> kind_from_name(std::string_view name);

/// Closed axis-aligned box. 2-D kinds use the first two axes and keep the
/// third at [0, 0]; angular boxes are (theta, phi) windows in degrees.
struct Box {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};

  static Box planar(double x0, double y0, double x1, double y1);
  static Box spatial(std::array<double, 3> lo, std::array<double, 3> hi);
  static Box angular(double theta0, double phi0, double theta1, double phi1);

  bool operator==(const Box&) const = default;
  auto operator<=>(const Box&) const = default;
};

/// Support of one dimension of variation: a union of boxes, or a finite set
/// of labels for discrete DVs.
class DVSupport {
 public:
  explicit DVSupport(SupportKind kind = SupportKind::kDiscrete) : kind_(kind) {}

  static DVSupport planar(std::vector<Box> boxes);
  static DVSupport spatial(std::vector<Box> boxes);
  static DVSupport angular(std::vector<Box> windows);
  static DVSupport discrete(std::set<std::string> labels);

  SupportKind kind() const { return kind_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  const std::set<std::string>& labels() const { return labels_; }
  bool empty() const { return boxes_.empty() && labels_.empty(); }

  /// Adds a box (throws KindMismatch for discrete supports). Boxes with
  /// lo > hi on any used axis are rejected with RangeError.
  void add(const Box& b);
  void add(std::string label);

  /// Sorts boxes and drops exact duplicates; the measure is unchanged.
  void canonicalize();

  /// Number of axes a box of this kind uses (0 for discrete).
  std::size_t dims() const;

  bool operator==(const DVSupport&) const = default;

 private:
  SupportKind kind_;
  std::vector<Box> boxes_;
  std::set<std::string> labels_;
};

class KindMismatch : public Error {
 public:
  KindMismatch(SupportKind a, SupportKind b)
      : Error("KindMismatch", std::string("support kinds differ: ") +
                                  std::string(kind_name(a)) + " vs " +
                                  std::string(kind_name(b))) {}
};

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("EmptyDataset", "cannot profile an empty dataset") {}
};

/// Lebesgue measure of the box union (overlaps counted once) for interval
/// kinds; cardinality for discrete supports.
double support_size(const DVSupport& s);

/// S(target) is a subset of S(cotrain), as closed sets. Decided exactly: each
/// target box is cut into elementary cells by the coordinates of every
/// cotrain box that touches it, and each cell is tested for cover.
bool is_aligned(const DVSupport& target, const DVSupport& cotrain);

enum class CaseLabel {
  kNotDiverseMisaligned,
  kDiverseMisaligned,
  kDiverseAligned,
  kNotDiverseAligned,
};

std::string_view case_name(CaseLabel c);

inline constexpr double kDefaultRho = 5.0;

struct Classification {
  CaseLabel label;
  double target_size;
  double cotrain_size;
  bool diverse;
  bool aligned;
  /// Target support has measure 0 while the co-training support does not;
  /// the ratio is undefined and the pair counts as diverse.
  bool zero_target;
};

/// diverse iff |S_C| >= rho * |S_T| (with the zero-target convention above);
/// aligned iff is_aligned. Throws KindMismatch, and RangeError unless rho > 1.
Classification classify(const DVSupport& target, const DVSupport& cotrain,
                        double rho = kDefaultRho);

CaseLabel classify_case(const DVSupport& target, const DVSupport& cotrain,
                        double rho = kDefaultRho);

// ---------------------------------------------------------------------------
// Dataset profiles

/// DV names used as profile keys. `camAngle` is the continuous companion of
/// the binned `camPose` support.
inline constexpr std::array<std::string_view, 8> kDvNames{
    "camPose", "camAngle", "objTex", "tableTex", "objSpat", "recepSpat", "motion", "scene"};

struct ProfileOptions {
  double spatial_cell = 0.02;      // meters
  double angular_cell_deg = 5.0;   // degrees, both axes
  metadata::Vec3 table_center{};
};

struct DatasetProfile {
  std::map<std::string, DVSupport> supports;
  std::size_t demo_count = 0;
  ProfileOptions options;

  const DVSupport& at(std::string_view dv) const;
  bool operator==(const DatasetProfile& o) const {
    return supports == o.supports && demo_count == o.demo_count;
  }
};

/// Per-DV supports of annotated records. Positions are dilated to the grid
/// cell (side `spatial_cell`, lattice anchored at the origin) that contains
/// them; camera directions likewise to `angular_cell_deg` windows. Throws
/// EmptyDataset.
DatasetProfile profile_dataset(std::span<const metadata::DemoRecord> records,
                               const ProfileOptions& options = {});

/// Per-DV union; demo counts add.
DatasetProfile merge(const DatasetProfile& a, const DatasetProfile& b);

/// Machine-readable form:
/// `{"demo_count":N,"options":{...},"supports":{"objSpat":{"kind":"interval2d",
///   "boxes":[[x0,y0,x1,y1],...],"size":...},"objTex":{"kind":"discrete",
///   "labels":[...],"size":...},...}}`. 3-D boxes are 6-tuples.
std::string profile_to_json(const DatasetProfile& p);
DatasetProfile profile_from_json(std::string_view text);

/// Human-readable summary, one line per DV.
std::string profile_report(const DatasetProfile& p);

}  // namespace dvkit::dvalgebra
