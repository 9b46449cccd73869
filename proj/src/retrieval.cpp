#include "dvkit/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "dvkit/sexpr.hpp"

namespace dvkit::retrieval {

using sexpr::Node;
using sexpr::NodeType;

namespace {

[[noreturn]] void syntax(const Node& at, const std::string& what) {
  throw SyntaxError(at.line, at.column, what);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string word_of(const Node& n, const std::string& what) {
  if (n.is(NodeType::kString) || n.is(NodeType::kSymbol)) return n.text;
  syntax(n, "expected " + what + ", found " + sexpr::type_name(n.type));
}

/// `(:k1 x y z :k2 x y z)`; every keyword takes three numbers.
std::map<std::string, Vec3> triple_form(const Node& list, const std::vector<std::string>& allowed) {
  if (!list.is(NodeType::kList)) syntax(list, "expected a list");
  std::map<std::string, Vec3> out;
  const auto& items = list.items;
  for (std::size_t i = 0; i < items.size(); i += 4) {
    const Node& key = items[i];
    if (!key.is(NodeType::kKeyword)) syntax(key, "expected keyword");
    if (std::find(allowed.begin(), allowed.end(), key.text) == allowed.end())
      syntax(key, "unknown keyword :" + key.text);
    if (out.count(key.text)) syntax(key, "duplicate keyword :" + key.text);
    if (i + 3 >= items.size()) syntax(key, ":" + key.text + " needs three numbers");
    double v[3];
    for (int k = 0; k < 3; ++k) {
      const Node& n = items[i + 1 + k];
      if (!n.is(NodeType::kNumber)) syntax(n, ":" + key.text + " needs three numbers");
      v[k] = n.number;
    }
    out[key.text] = Vec3{v[0], v[1], v[2]};
  }
  return out;
}

RetrievalQuery query_from(const Node& root) {
  if (!root.is(NodeType::kList) || root.items.empty() || !root.items.front().is_symbol("query"))
    syntax(root, "expected (query ...)");
  RetrievalQuery q;
  for (const auto& [key, value] : sexpr::keyword_fields(root, 1)) {
    const std::string& k = key->text;
    if (k == "object") {
      ObjectFilter f;
      if (value->is(NodeType::kList)) {
        if (value->items.size() != 2) syntax(*value, "expected (include \"x\") or (exclude \"x\")");
        const std::string mode = word_of(value->items[0], "include or exclude");
        if (mode == "include") f.mode = ObjectFilter::Mode::kInclude;
        else if (mode == "exclude") f.mode = ObjectFilter::Mode::kExclude;
        else syntax(value->items[0], "expected include or exclude");
        f.object = lower(word_of(value->items[1], "object name"));
      } else {
        f.object = lower(word_of(*value, "object name"));
      }
      q.object = f;
    } else if (k == "campose") {
      auto t = triple_form(*value, {"pos", "tol"});
      if (!t.count("pos")) syntax(*value, ":campose needs :pos");
      CameraFilter f;
      f.target = t["pos"];
      if (t.count("tol")) f.tolerance = t["tol"];
      q.campose = f;
    } else if (k == "objspat") {
      auto t = triple_form(*value, {"center", "extent"});
      if (!t.count("center")) syntax(*value, ":objspat needs :center");
      CuboidFilter f;
      f.center = t["center"];
      if (t.count("extent")) f.extent = t["extent"];
      q.objspat = f;
    } else if (k == "color") {
      q.color = lower(word_of(*value, "color"));
    } else if (k == "motion") {
      std::set<std::string> prims;
      if (value->is(NodeType::kList)) {
        for (const Node& n : value->items) prims.insert(word_of(n, "primitive name"));
      } else {
        prims.insert(word_of(*value, "primitive name"));
      }
      q.motion = std::move(prims);
    } else {
      syntax(*key, "unknown keyword :" + k);
    }
  }
  q.validate();
  return q;
}

std::string vec_text(const Vec3& v) {
  return sexpr::format_number(v.x) + " " + sexpr::format_number(v.y) + " " +
         sexpr::format_number(v.z);
}

std::string canonical_query_color(const std::string& c) {
  try {
    return metadata::canonical_color(c);
  } catch (const metadata::UnrecognizedColor&) {
    return lower(c);
  }
}

bool within(double lo, double v, double hi) { return lo <= v && v <= hi; }

}  // namespace

void RetrievalQuery::validate() const {
  if (!object && !campose && !objspat && !color && !motion)
    throw RangeError("query", "at least one filter is required");
  if (object && object->object.empty()) throw RangeError("object", "object name is empty");
  auto positive = [](const Vec3& v, const char* field, const char* what) {
    if (!(v.x > 0 && v.y > 0 && v.z > 0))
      throw RangeError(field, std::string(what) + " must be positive on every axis");
  };
  if (campose) positive(campose->tolerance, "campose", "tolerance");
  if (objspat) positive(objspat->extent, "objspat", "extent");
  if (color && color->empty()) throw RangeError("color", "color is empty");
  if (motion && motion->empty()) throw RangeError("motion", "no primitives given");
}

RetrievalQuery parse_query(std::string_view text) { return query_from(sexpr::read_one(text)); }

std::vector<RetrievalQuery> parse_queries(std::string_view text) {
  std::vector<RetrievalQuery> out;
  for (const Node& n : sexpr::read_all(text)) out.push_back(query_from(n));
  return out;
}

std::string serialize_query(const RetrievalQuery& q) {
  std::string s = "(query";
  if (q.object) {
    s += " :object (";
    s += q.object->mode == ObjectFilter::Mode::kInclude ? "include " : "exclude ";
    s += sexpr::quote(q.object->object) + ")";
  }
  if (q.campose)
    s += " :campose (:pos " + vec_text(q.campose->target) + " :tol " +
         vec_text(q.campose->tolerance) + ")";
  if (q.objspat)
    s += " :objspat (:center " + vec_text(q.objspat->center) + " :extent " +
         vec_text(q.objspat->extent) + ")";
  if (q.color) s += " :color " + sexpr::quote(*q.color);
  if (q.motion) {
    s += " :motion (";
    bool first = true;
    for (const auto& m : *q.motion) {
      if (!first) s += ' ';
      s += m;
      first = false;
    }
    s += ")";
  }
  return s + ")";
}

bool camera_matches(const CameraFilter& f, const Vec3& p) {
  const Vec3& t = f.target;
  const Vec3& d = f.tolerance;
  return within(t.x - d.x, p.x, t.x + d.x) && within(t.y - d.y, p.y, t.y + d.y) &&
         within(t.z - d.z, p.z, t.z + d.z);
}

bool cuboid_matches(const CuboidFilter& f, const Vec3& p) {
  const Vec3& c = f.center;
  const Vec3& e = f.extent;
  return within(c.x - e.x / 2, p.x, c.x + e.x / 2) && within(c.y - e.y / 2, p.y, c.y + e.y / 2) &&
         within(c.z - e.z / 2, p.z, c.z + e.z / 2);
}

// ---------------------------------------------------------------------------
// Grid

std::int64_t DemoIndex::Grid::cell(double v) {
  constexpr double kLimit = 1 << 20;
  const double c = std::floor(v / kGridCell);
  return static_cast<std::int64_t>(std::clamp(c, -kLimit, kLimit - 1));
}

std::int64_t DemoIndex::Grid::key(std::int64_t i, std::int64_t j, std::int64_t k) {
  constexpr std::int64_t kOff = 1 << 20;
  return ((i + kOff) << 42) | ((j + kOff) << 21) | (k + kOff);
}

void DemoIndex::Grid::insert(const Vec3& p, std::uint32_t ordinal) {
  cells_[key(cell(p.x), cell(p.y), cell(p.z))].push_back(ordinal);
}

template <typename F>
void DemoIndex::Grid::for_cells(const Vec3& lo, const Vec3& hi, F&& fn) const {
  const std::int64_t i0 = cell(lo.x), i1 = cell(hi.x);
  const std::int64_t j0 = cell(lo.y), j1 = cell(hi.y);
  const std::int64_t k0 = cell(lo.z), k1 = cell(hi.z);
  if (i1 < i0 || j1 < j0 || k1 < k0) return;
  const double span = static_cast<double>(i1 - i0 + 1) * static_cast<double>(j1 - j0 + 1) *
                      static_cast<double>(k1 - k0 + 1);
  if (span > static_cast<double>(cells_.size())) {
    // Wide query: walk the occupied cells instead of the covered ones.
    for (const auto& [k, ords] : cells_) {
      constexpr std::int64_t kOff = 1 << 20, kMask = (1 << 21) - 1;
      const std::int64_t i = (k >> 42) - kOff, j = ((k >> 21) & kMask) - kOff,
                         kk = (k & kMask) - kOff;
      if (i >= i0 && i <= i1 && j >= j0 && j <= j1 && kk >= k0 && kk <= k1) fn(ords);
    }
    return;
  }
  for (std::int64_t i = i0; i <= i1; ++i)
    for (std::int64_t j = j0; j <= j1; ++j)
      for (std::int64_t k = k0; k <= k1; ++k)
        if (auto it = cells_.find(key(i, j, k)); it != cells_.end()) fn(it->second);
}

void DemoIndex::Grid::gather(const Vec3& lo, const Vec3& hi,
                             std::vector<std::uint32_t>& out) const {
  for_cells(lo, hi, [&](const std::vector<std::uint32_t>& ords) {
    out.insert(out.end(), ords.begin(), ords.end());
  });
}

std::size_t DemoIndex::Grid::estimate(const Vec3& lo, const Vec3& hi) const {
  std::size_t n = 0;
  for_cells(lo, hi, [&](const std::vector<std::uint32_t>& ords) { n += ords.size(); });
  return n;
}

// ---------------------------------------------------------------------------
// Building

IndexBuilder& IndexBuilder::add(const metadata::DemoRecord& r) {
  if (!seen_.insert(r.id).second) throw BuildError("DuplicateId", "duplicate record id '" + r.id + "'");
  DemoIndex& x = index_;
  const auto ord = static_cast<std::uint32_t>(x.ids_.size());
  DemoIndex::Entry e;
  e.camera = r.camera_extrinsics.pos;
  x.camera_grid_.insert(e.camera, ord);

  const metadata::Annotations none;
  const metadata::Annotations& a = r.annotations ? *r.annotations : none;
  if (a.target_object) {
    auto [it, fresh] =
        x.object_codes_.try_emplace(*a.target_object, static_cast<std::int32_t>(x.by_object_.size()));
    if (fresh) x.by_object_.emplace_back();
    e.object_code = it->second;
    x.by_object_[it->second].push_back(ord);
  } else {
    e.missing |= static_cast<std::uint8_t>(Need::kTargetObject);
  }
  if (a.object_position) {
    e.object = *a.object_position;
    x.object_grid_.insert(e.object, ord);
  } else {
    e.missing |= static_cast<std::uint8_t>(Need::kObjectPosition);
  }
  if (a.object_color) {
    auto [it, fresh] =
        x.color_codes_.try_emplace(*a.object_color, static_cast<std::int32_t>(x.by_color_.size()));
    if (fresh) x.by_color_.emplace_back();
    e.color_code = it->second;
    x.by_color_[it->second].push_back(ord);
  } else {
    e.missing |= static_cast<std::uint8_t>(Need::kObjectColor);
  }
  if (a.motion.empty()) e.missing |= static_cast<std::uint8_t>(Need::kMotion);
  const std::size_t words = ord / 64 + 1;
  for (const auto& m : a.motion) {
    auto [it, fresh] = x.motion_slots_.try_emplace(m, x.motion_bits_.size());
    if (fresh) x.motion_bits_.emplace_back();
    auto& bits = x.motion_bits_[it->second];
    if (bits.size() < words) bits.resize(words, 0);
    bits[ord / 64] |= std::uint64_t{1} << (ord % 64);
  }

  x.ids_.push_back(r.id);
  x.entries_.push_back(e);
  return *this;
}

DemoIndex IndexBuilder::finish() && {
  const std::size_t words = (index_.ids_.size() + 63) / 64;
  for (auto& bits : index_.motion_bits_) bits.resize(words, 0);
  return std::move(index_);
}

DemoIndex DemoIndex::build(std::span<const metadata::DemoRecord> records) {
  IndexBuilder b;
  for (const auto& r : records) b.add(r);
  return std::move(b).finish();
}

// ---------------------------------------------------------------------------
// Querying

std::int32_t DemoIndex::code_of(const std::unordered_map<std::string, std::int32_t>& dict,
                                const std::string& s) const {
  auto it = dict.find(s);
  return it == dict.end() ? -1 : it->second;
}

bool DemoIndex::matches(std::uint32_t ord, const RetrievalQuery& q, std::int32_t object_code,
                        std::int32_t color_code, const std::vector<std::size_t>& motion_slots,
                        bool motion_known) const {
  const Entry& e = entries_[ord];
  if (q.object) {
    if (q.object->mode == ObjectFilter::Mode::kInclude) {
      if (object_code < 0 || e.object_code != object_code) return false;
    } else if (e.object_code < 0 || e.object_code == object_code) {
      return false;
    }
  }
  if (q.campose && !camera_matches(*q.campose, e.camera)) return false;
  if (q.objspat) {
    if (e.missing & static_cast<std::uint8_t>(Need::kObjectPosition)) return false;
    if (!cuboid_matches(*q.objspat, e.object)) return false;
  }
  if (q.color && (color_code < 0 || e.color_code != color_code)) return false;
  if (q.motion) {
    if (!motion_known) return false;
    for (std::size_t slot : motion_slots)
      if (!(motion_bits_[slot][ord / 64] >> (ord % 64) & 1)) return false;
  }
  return true;
}

std::vector<std::uint32_t> DemoIndex::retrieve_ordinals(const RetrievalQuery& q) const {
  q.validate();
  const std::int32_t object_code = q.object ? code_of(object_codes_, q.object->object) : -1;
  const std::int32_t color_code = q.color ? code_of(color_codes_, canonical_query_color(*q.color)) : -1;
  std::vector<std::size_t> slots;
  bool motion_known = true;
  if (q.motion) {
    for (const auto& m : *q.motion) {
      auto it = motion_slots_.find(m);
      if (it == motion_slots_.end()) motion_known = false;
      else slots.push_back(it->second);
    }
  }

  // Pick the candidate generator with the fewest candidates.
  enum class Source { kScan, kObject, kColor, kCamera, kCuboid, kMotion };
  Source source = Source::kScan;
  std::size_t best = entries_.size();
  auto consider = [&](Source s, std::size_t n) {
    if (n < best) {
      best = n;
      source = s;
    }
  };
  if (q.object && q.object->mode == ObjectFilter::Mode::kInclude)
    consider(Source::kObject, object_code < 0 ? 0 : by_object_[object_code].size());
  if (q.color) consider(Source::kColor, color_code < 0 ? 0 : by_color_[color_code].size());
  Vec3 cam_lo, cam_hi, cub_lo, cub_hi;
  if (q.campose) {
    const Vec3& t = q.campose->target;
    const Vec3& d = q.campose->tolerance;
    cam_lo = {t.x - d.x, t.y - d.y, t.z - d.z};
    cam_hi = {t.x + d.x, t.y + d.y, t.z + d.z};
    consider(Source::kCamera, camera_grid_.estimate(cam_lo, cam_hi));
  }
  if (q.objspat) {
    const Vec3& c = q.objspat->center;
    const Vec3& e = q.objspat->extent;
    cub_lo = {c.x - e.x / 2, c.y - e.y / 2, c.z - e.z / 2};
    cub_hi = {c.x + e.x / 2, c.y + e.y / 2, c.z + e.z / 2};
    consider(Source::kCuboid, object_grid_.estimate(cub_lo, cub_hi));
  }
  if (q.motion) {
    std::size_t n = 0;
    if (motion_known && !slots.empty()) {
      n = std::numeric_limits<std::size_t>::max();
      for (std::size_t s : slots) {
        std::size_t c = 0;
        for (std::uint64_t w : motion_bits_[s]) c += static_cast<std::size_t>(std::popcount(w));
        n = std::min(n, c);
      }
    }
    consider(Source::kMotion, n);
  }

  std::vector<std::uint32_t> out;
  auto keep = [&](std::uint32_t ord) {
    if (matches(ord, q, object_code, color_code, slots, motion_known)) out.push_back(ord);
  };
  switch (source) {
    case Source::kScan:
      for (std::uint32_t i = 0; i < entries_.size(); ++i) keep(i);
      break;
    case Source::kObject:
      if (object_code < 0) break;  // unknown object, nothing can match
      for (std::uint32_t i : by_object_[object_code]) keep(i);
      break;
    case Source::kColor:
      if (color_code < 0) break;
      for (std::uint32_t i : by_color_[color_code]) keep(i);
      break;
    case Source::kCamera:
    case Source::kCuboid: {
      std::vector<std::uint32_t> cand;
      cand.reserve(best);
      if (source == Source::kCamera) camera_grid_.gather(cam_lo, cam_hi, cand);
      else object_grid_.gather(cub_lo, cub_hi, cand);
      std::sort(cand.begin(), cand.end());
      for (std::uint32_t i : cand) keep(i);
      break;
    }
    case Source::kMotion: {
      if (!motion_known || slots.empty()) break;
      const auto& first = motion_bits_[slots.front()];
      for (std::size_t w = 0; w < first.size(); ++w) {
        std::uint64_t bits = first[w];
        while (bits) {
          const int b = std::countr_zero(bits);
          bits &= bits - 1;
          keep(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(b)));
        }
      }
      break;
    }
  }
  return out;
}

std::vector<std::string> DemoIndex::retrieve(const RetrievalQuery& q) const {
  std::vector<std::string> ids;
  for (std::uint32_t ord : retrieve_ordinals(q)) ids.push_back(ids_[ord]);
  return ids;
}

std::vector<std::string> DemoIndex::missing(Need need) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].missing & static_cast<std::uint8_t>(need)) out.push_back(ids_[i]);
  return out;
}

RetrievalReport DemoIndex::report(const RetrievalQuery& q) const {
  q.validate();
  RetrievalReport r;
  r.records = entries_.size();
  auto count_missing = [&](Need need) {
    std::size_t n = 0;
    for (const Entry& e : entries_)
      if (e.missing & static_cast<std::uint8_t>(need)) ++n;
    return n;
  };
  RetrievalQuery cumulative;
  auto stage = [&](const std::string& name, std::string detail, RetrievalQuery single,
                   std::size_t missing) {
    r.stages.push_back({name, std::move(detail), retrieve_ordinals(single).size(),
                        retrieve_ordinals(cumulative).size(), missing});
  };
  if (q.object) {
    RetrievalQuery s;
    s.object = cumulative.object = q.object;
    const bool inc = q.object->mode == ObjectFilter::Mode::kInclude;
    stage("object", std::string(inc ? "include " : "exclude ") + q.object->object, s,
          count_missing(Need::kTargetObject));
  }
  if (q.campose) {
    RetrievalQuery s;
    s.campose = cumulative.campose = q.campose;
    stage("campose",
          "pos " + vec_text(q.campose->target) + " tol " + vec_text(q.campose->tolerance), s, 0);
  }
  if (q.color) {
    RetrievalQuery s;
    s.color = cumulative.color = q.color;
    stage("color", *q.color, s, count_missing(Need::kObjectColor));
  }
  if (q.objspat) {
    RetrievalQuery s;
    s.objspat = cumulative.objspat = q.objspat;
    stage("objspat",
          "center " + vec_text(q.objspat->center) + " extent " + vec_text(q.objspat->extent), s,
          count_missing(Need::kObjectPosition));
  }
  if (q.motion) {
    RetrievalQuery s;
    s.motion = cumulative.motion = q.motion;
    std::string detail;
    for (const auto& m : *q.motion) detail += (detail.empty() ? "" : " ") + m;
    stage("motion", detail, s, count_missing(Need::kMotion));
  }
  return r;
}

std::string report_text(const RetrievalReport& r) {
  std::ostringstream os;
  os << "records: " << r.records << "\n";
  for (const auto& s : r.stages) {
    os << s.filter << " (" << s.detail << "): after " << s.cumulative << ", alone " << s.single;
    if (s.missing) os << ", missing annotation " << s.missing;
    os << "\n";
  }
  return os.str();
}

std::string report_json(const RetrievalReport& r) {
  nlohmann::json j;
  j["records"] = r.records;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : r.stages)
    j["stages"].push_back({{"filter", s.filter},
                           {"detail", s.detail},
                           {"cumulative", s.cumulative},
                           {"single", s.single},
                           {"missing_annotation", s.missing}});
  return j.dump();
}

}  // namespace dvkit::retrieval
