#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dvkit/error.hpp"
#include "dvkit/metadata.hpp"

namespace dvkit::retrieval {

using metadata::Vec3;

/// Camera tolerance: within 20 cm in x and y and 10 cm in z of the target.
inline constexpr Vec3 kDefaultCameraTolerance{0.20, 0.20, 0.10};
/// Object cuboid: 60 x 60 x 30 cm centered on the target distribution.
inline constexpr Vec3 kDefaultCuboidExtent{0.60, 0.60, 0.30};
/// Side of the uniform grid cells used for both spatial indexes.
inline constexpr double kGridCell = 0.1;

struct ObjectFilter {
  enum class Mode { kInclude, kExclude };
  Mode mode = Mode::kInclude;
  std::string object;
  bool operator==(const ObjectFilter&) const = default;
};

/// Matches when target - tol <= camera <= target + tol on every axis.
struct CameraFilter {
  Vec3 target;
  Vec3 tolerance = kDefaultCameraTolerance;
  bool operator==(const CameraFilter&) const = default;
};

/// Matches when center - extent/2 <= object_position <= center + extent/2.
struct CuboidFilter {
  Vec3 center;
  Vec3 extent = kDefaultCuboidExtent;
  bool operator==(const CuboidFilter&) const = default;
};

struct RetrievalQuery {
  std::optional<ObjectFilter> object;
  std::optional<CameraFilter> campose;
  std::optional<CuboidFilter> objspat;
  std::optional<std::string> color;
  std::optional<std::set<std::string>> motion;  // record must carry all of them

  /// Throws RangeError when no filter is present or a tolerance/extent is
  /// not positive.
  void validate() const;
  bool operator==(const RetrievalQuery&) const = default;
};

/// `(query :object (include "marker") :campose (:pos x y z [:tol dx dy dz])
///  :objspat (:center x y z [:extent ex ey ez]) :color "red" :motion (pick place))`.
/// Omitted tolerances take the defaults above.
RetrievalQuery parse_query(std::string_view text);

/// One query per non-blank line; `;` comments allowed.
std::vector<RetrievalQuery> parse_queries(std::string_view text);

/// Canonical text with every default spelled out.
std::string serialize_query(const RetrievalQuery& q);

/// Definitional predicates, shared by the index and by linear scans.
bool camera_matches(const CameraFilter& f, const Vec3& camera);
bool cuboid_matches(const CuboidFilter& f, const Vec3& position);

class BuildError : public Error {
 public:
  BuildError(const std::string& kind, const std::string& what) : Error(kind, what) {}
};

/// Annotations a filter depends on.
enum class Need : std::uint8_t {
  kTargetObject = 1,
  kObjectPosition = 2,
  kObjectColor = 4,
  kMotion = 8,
};

struct StageCount {
  std::string filter;     // e.g. "object", "campose"
  std::string detail;     // the filter's parameters, defaults included
  std::size_t single;     // matches of this filter alone
  std::size_t cumulative; // matches of this and all earlier stages
  std::size_t missing;    // records lacking the annotation this filter needs
};

struct RetrievalReport {
  std::size_t records = 0;
  std::vector<StageCount> stages;  // object, campose, color, objspat, motion
};

std::string report_text(const RetrievalReport& r);
std::string report_json(const RetrievalReport& r);

/// Immutable index over annotated records: hash indexes on target object and
/// color, uniform 3-D grids on camera and object positions, and one bitmap
/// per motion primitive. Results are always in insertion order.
class DemoIndex {
 public:
  static DemoIndex build(std::span<const metadata::DemoRecord> records);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::uint32_t ordinal) const { return ids_[ordinal]; }

  std::vector<std::uint32_t> retrieve_ordinals(const RetrievalQuery& q) const;
  std::vector<std::string> retrieve(const RetrievalQuery& q) const;
  RetrievalReport report(const RetrievalQuery& q) const;

  /// Ids of records lacking an annotation the given need depends on.
  std::vector<std::string> missing(Need need) const;

 private:
  struct Entry {
    Vec3 camera;
    Vec3 object;
    std::int32_t object_code = -1;
    std::int32_t color_code = -1;
    std::uint8_t missing = 0;  // Need bits
  };

  class Grid {
   public:
    void insert(const Vec3& p, std::uint32_t ordinal);
    /// Ordinals in cells overlapping [lo, hi]; unsorted, not exact-checked.
    void gather(const Vec3& lo, const Vec3& hi, std::vector<std::uint32_t>& out) const;
    std::size_t estimate(const Vec3& lo, const Vec3& hi) const;

   private:
    static std::int64_t key(std::int64_t i, std::int64_t j, std::int64_t k);
    static std::int64_t cell(double v);
    template <typename F>
    void for_cells(const Vec3& lo, const Vec3& hi, F&& fn) const;
    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
  };

  std::int32_t code_of(const std::unordered_map<std::string, std::int32_t>& dict,
                       const std::string& s) const;
  bool matches(std::uint32_t ordinal, const RetrievalQuery& q, std::int32_t object_code,
               std::int32_t color_code, const std::vector<std::size_t>& motion_slots,
               bool motion_known) const;

  std::vector<std::string> ids_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::int32_t> object_codes_;
  std::unordered_map<std::string, std::int32_t> color_codes_;
  std::vector<std::vector<std::uint32_t>> by_object_;
  std::vector<std::vector<std::uint32_t>> by_color_;
  Grid camera_grid_;
  Grid object_grid_;
  std::unordered_map<std::string, std::size_t> motion_slots_;
  std::vector<std::vector<std::uint64_t>> motion_bits_;

  friend class IndexBuilder;
};

/// Incremental construction, so records can be streamed from disk.
class IndexBuilder {
 public:
  /// Throws BuildError("DuplicateId") on a repeated id.
  IndexBuilder& add(const metadata::DemoRecord& record);
  DemoIndex finish() &&;

 private:
  DemoIndex index_;
  std::unordered_set<std::string> seen_;
};

}  // namespace dvkit::retrieval
