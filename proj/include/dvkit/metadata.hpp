#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dvkit/error.hpp"

namespace dvkit::metadata {

struct Vec3 {
  double x = 0, y = 0, z = 0;
  bool operator==(const Vec3&) const = default;
};

/// Quaternion stored (w, x, y, z).
struct Quat {
  double w = 1, x = 0, y = 0, z = 0;
  double norm() const;
  bool operator==(const Quat&) const = default;
};

struct CameraExtrinsics {
  Vec3 pos;
  Quat quat;
  bool operator==(const CameraExtrinsics&) const = default;
};

struct Step {
  std::int64_t t = 0;
  Vec3 ee_pos;
  Quat ee_quat;
  double gripper = 0;  // 1 = closed
  bool operator==(const Step&) const = default;
};

/// Per-demo derived metadata. The first four fields are the standard
/// annotations; `receptacle_position`, `motion` and `table_color` are
/// optional extensions used by profiling and motion retrieval.
struct Annotations {
  std::optional<std::string> target_object;
  std::optional<Vec3> object_position;
  std::optional<std::string> object_color;
  std::optional<std::string> camera_bin;
  std::optional<Vec3> receptacle_position;
  std::vector<std::string> motion;
  std::optional<std::string> table_color;
  bool operator==(const Annotations&) const = default;
};

struct DemoRecord {
  std::string id;
  std::string lab;
  std::vector<std::string> instructions;
  CameraExtrinsics camera_extrinsics;
  std::vector<Step> steps;
  std::optional<Annotations> annotations;
  bool operator==(const DemoRecord&) const = default;
};

class QuaternionNorm : public Error {
 public:
  QuaternionNorm(std::size_t line_no, const std::string& field_name)
      : Error("QuaternionNorm", "line " + std::to_string(line_no) + ": " +
                                    field_name + ": quaternion norm differs from 1 by more than 1e-6") {
    line = line_no;
    field = field_name;
  }
};

// ---------------------------------------------------------------------------
// Ingestion

/// Parses and validates one line of the dataset format. `line_no` is
/// attached to every error.
DemoRecord parse_record(std::string_view json_line, std::size_t line_no);

/// Streams every record in a line-delimited file; blank lines are skipped.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(DemoRecord&&, std::size_t line_no)>& fn);

std::vector<DemoRecord> ingest(const std::filesystem::path& path);

/// One record as a single JSON line (no trailing newline). Reads back
/// through parse_record to an equal record.
std::string to_json_line(const DemoRecord& record);

void write_records(std::ostream& os, std::span<const DemoRecord> records);

// ---------------------------------------------------------------------------
// Gripper heuristics

inline constexpr std::size_t kGripperWindow = 15;
inline constexpr double kGripperThreshold = 0.5;

/// Centered moving average of the gripper signal; the window is truncated at
/// the ends and divides by the number of samples actually covered.
std::vector<double> smooth_gripper(std::span<const Step> steps,
                                   std::size_t window = kGripperWindow);

struct GripperTransition {
  std::size_t index;  // first step on the new side of the threshold
  bool closing;
};

/// Threshold crossings of a smoothed signal: closing when s[i-1] < 0.5 <=
/// s[i], opening when s[i-1] >= 0.5 > s[i].
std::vector<GripperTransition> gripper_transitions(std::span<const double> smoothed,
                                                   double threshold = kGripperThreshold);

/// End-effector position at the first smoothed closing crossing.
std::optional<Vec3> extract_object_position(std::span<const Step> steps);

/// End-effector position at the first smoothed opening crossing that follows
/// the first closing crossing.
std::optional<Vec3> extract_receptacle_position(std::span<const Step> steps);

// ---------------------------------------------------------------------------
// Camera bins

struct SphericalCoords {
  double r = 0;
  double theta_deg = 0;  // polar, from +z
  double phi_deg = 0;    // azimuth, atan2(y, x), in (-180, 180]
};

class DegeneratePose : public Error {
 public:
  DegeneratePose() : Error("DegeneratePose", "camera position coincides with table center") {}
};

SphericalCoords to_spherical(const Vec3& pos, const Vec3& center);

struct CameraBin {
  std::string label;
  double polar_center_deg = 45;
  double azimuth_center_deg = 0;
};

/// Windows of `polar_width_deg` x `azimuth_width_deg` centered on each bin.
/// Boundaries are inclusive; azimuth distances wrap at +-180.
struct BinTable {
  double polar_width_deg = 15.0;
  double azimuth_width_deg = 30.0;
  std::vector<CameraBin> bins;

  /// agent-front 0, agent-left +60, agent-right -60, shoulder-left +120,
  /// shoulder-right -120; polar center 45 for all.
  static BinTable defaults();

  /// `{"polar_width_deg":..,"azimuth_width_deg":..,"bins":[{"label":..,
  /// "polar_center_deg":..,"azimuth_center_deg":..}]}`. Overlapping windows
  /// are rejected.
  static BinTable from_json_file(const std::filesystem::path& path);
  static BinTable from_json_text(std::string_view text);
};

inline constexpr std::string_view kUnbinned = "unbinned";

std::string bin_camera_pose(const Vec3& camera_pos, const Vec3& table_center,
                            const BinTable& table = BinTable::defaults());

// ---------------------------------------------------------------------------
// Target object extraction

class NoVerbFound : public Error {
 public:
  NoVerbFound() : Error("NoVerbFound", "no manipulation verb in instructions") {}
};

class NoObjectFound : public Error {
 public:
  NoObjectFound() : Error("NoObjectFound", "no object follows a manipulation verb") {}
};

/// Action verbs (all inflected forms listed explicitly).
class VerbLexicon {
 public:
  VerbLexicon() = default;
  explicit VerbLexicon(std::unordered_set<std::string> forms) : forms_(std::move(forms)) {}

  static const VerbLexicon& defaults();
  /// One verb per line; regular -s/-ed/-ing forms are added automatically.
  static VerbLexicon from_file(const std::filesystem::path& path);
  void add_base(std::string_view verb);

  bool contains(std::string_view word) const { return forms_.count(std::string(word)) > 0; }

 private:
  std::unordered_set<std::string> forms_;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  /// Vector for a lowercased word or compound ("coffee pod"); nullopt when
  /// the word is out of vocabulary.
  virtual std::optional<std::vector<double>> embed(std::string_view word) const = 0;
};

/// Fixed word-vector table. Text format: `word v1 v2 ... vd` per line, with
/// compounds written with '_' ("coffee_pod").
class TableEmbeddings : public EmbeddingProvider {
 public:
  static TableEmbeddings from_file(const std::filesystem::path& path);
  void add(std::string word, std::vector<double> vec);
  std::optional<std::vector<double>> embed(std::string_view word) const override;
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::vector<double>> table_;
};

struct ObjectMention {
  std::string word;
  bool direct = false;
  std::size_t order = 0;  // position among all mentions
};

/// Lowercases, splits on sentence punctuation and newlines, drops repeated
/// clauses, and joins what remains with ". ".
std::string merge_instructions(std::span<const std::string> instructions);

/// Rule-based parse of merged text: the head noun of the phrase after each
/// lexicon verb is a direct object; heads of prepositional phrases that
/// follow are indirect objects. Pronouns are skipped. Compounds present in
/// `vocab` ("coffee pod") are kept whole. Throws NoVerbFound.
std::vector<ObjectMention> parse_object_mentions(std::string_view merged,
                                                 const VerbLexicon& lexicon,
                                                 const EmbeddingProvider& vocab);

inline constexpr double kDefaultClusterCut = 0.35;

/// Average-linkage agglomerative clustering on cosine distance; merging stops
/// once the closest pair of clusters is farther than `cut`. Returns cluster
/// id per input vector; ids are numbered by first member.
std::vector<std::size_t> agglomerate(std::span<const std::vector<double>> vectors,
                                     double cut = kDefaultClusterCut);

/// Merges the instructions, parses object mentions, clusters them, picks the
/// primary cluster (most direct mentions, then earliest direct mention) and
/// returns its direct-object member most similar to the cluster centroid;
/// ties go to the first occurrence.
std::string extract_target_object(std::span<const std::string> instructions,
                                  const VerbLexicon& lexicon,
                                  const EmbeddingProvider& embeddings,
                                  double cut = kDefaultClusterCut);

// ---------------------------------------------------------------------------
// Color annotation

class AnnotatorUnavailable : public Error {
 public:
  explicit AnnotatorUnavailable(const std::string& what)
      : Error("AnnotatorUnavailable", what) {}
};

class UnrecognizedColor : public Error {
 public:
  explicit UnrecognizedColor(const std::string& raw)
      : Error("UnrecognizedColor", "unrecognized color '" + raw + "'") {}
};

class ColorAnnotator {
 public:
  virtual ~ColorAnnotator() = default;
  /// Free-form color answer for `object` in the first frame of `record`.
  virtual std::string raw_color(const DemoRecord& record, const std::string& object) const = 0;
};

/// Answers from a fixed id -> color table.
class OfflineColorAnnotator : public ColorAnnotator {
 public:
  explicit OfflineColorAnnotator(std::map<std::string, std::string> table)
      : table_(std::move(table)) {}
  /// JSON object `{"<id>": "<color>", ...}`.
  static OfflineColorAnnotator from_json_file(const std::filesystem::path& path);
  std::string raw_color(const DemoRecord& record, const std::string& object) const override;

 private:
  std::map<std::string, std::string> table_;
};

/// POSTs `{"id","image_ref","object"}` to an external service and reads
/// `{"color"}`. Safe for concurrent use (one connection per call).
class HttpColorAnnotator : public ColorAnnotator {
 public:
  HttpColorAnnotator(std::string url, int timeout_ms = 5000, int retries = 2);
  /// Reads DVC_ANNOTATOR_URL, DVC_ANNOTATOR_TIMEOUT_MS and
  /// DVC_ANNOTATOR_RETRIES; nullptr when the URL is unset.
  static std::unique_ptr<HttpColorAnnotator> from_env();
  std::string raw_color(const DemoRecord& record, const std::string& object) const override;

  const std::string& url() const { return url_; }
  int timeout_ms() const { return timeout_ms_; }
  int retries() const { return retries_; }

 private:
  std::string url_;
  std::string host_;
  std::string path_;
  int timeout_ms_;
  int retries_;
};

/// Lowercases, strips punctuation, folds synonyms ("crimson" -> "red") and
/// checks the result against the canonical palette.
std::string canonical_color(std::string_view raw);

const std::set<std::string>& canonical_palette();

std::string annotate_color(const DemoRecord& record, const ColorAnnotator& annotator);

// ---------------------------------------------------------------------------
// Full pipeline

struct AnnotateConfig {
  const VerbLexicon* lexicon = nullptr;
  const EmbeddingProvider* embeddings = nullptr;
  const ColorAnnotator* annotator = nullptr;  // optional
  BinTable bins = BinTable::defaults();
  Vec3 table_center{};
  double cluster_cut = kDefaultClusterCut;
};

/// Annotations for one record. Failures of individual extractors leave the
/// corresponding field empty; `motion` and `table_color` are carried over
/// from existing annotations.
Annotations annotate(const DemoRecord& record, const AnnotateConfig& config);

}  // namespace dvkit::metadata
