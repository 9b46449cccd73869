#include "dvkit/taskspec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "dvkit/rng.hpp"
#include "dvkit/sexpr.hpp"

namespace dvkit::taskspec {

using sexpr::Node;
using sexpr::NodeType;

namespace {

constexpr std::array<std::pair<PrimitiveKind, std::string_view>, 9> kPrimitiveNames{{
    {PrimitiveKind::kPick, "pick"},
    {PrimitiveKind::kPlace, "place"},
    {PrimitiveKind::kPush, "push"},
    {PrimitiveKind::kPull, "pull"},
    {PrimitiveKind::kOpen, "open"},
    {PrimitiveKind::kClose, "close"},
    {PrimitiveKind::kPlaceBin, "placeBin"},
    {PrimitiveKind::kPickPlaceTopDrawer, "pickPlaceTopDrawer"},
    {PrimitiveKind::kPickPlaceBasket, "pickPlaceBasket"},
}};

[[noreturn]] void syntax(const Node& at, const std::string& what) {
  throw SyntaxError(at.line, at.column, what);
}

[[noreturn]] void range(const Node& at, const std::string& field,
                        const std::string& what) {
  RangeError err(field, what);
  err.line = at.line;
  err.column = at.column;
  throw err;
}

const Node& expect(const Node& n, NodeType t, const std::string& what) {
  if (!n.is(t))
    syntax(n, "expected " + what + ", found " + sexpr::type_name(n.type));
  return n;
}

const std::string& head_symbol(const Node& list, const std::string& what) {
  expect(list, NodeType::kList, what);
  if (list.items.empty() || !list.items.front().is(NodeType::kSymbol))
    syntax(list, "expected " + what);
  return list.items.front().text;
}

/// `(head :k1 a b :k2 c d ...)` where every keyword is followed by exactly
/// two numbers. Returns keyword -> (lo, hi) and the optional `:base` string.
struct PairForm {
  std::map<std::string, std::pair<double, double>> pairs;
  std::optional<std::string> base;
};

PairForm pair_form(const Node& list, const std::vector<std::string>& allowed,
                   bool allow_base) {
  PairForm out;
  const auto& items = list.items;
  std::size_t i = 1;
  while (i < items.size()) {
    const Node& key = expect(items[i], NodeType::kKeyword, "keyword");
    if (allow_base && key.text == "base") {
      if (out.base) syntax(key, "duplicate keyword :base");
      if (i + 1 >= items.size()) syntax(key, "keyword :base has no value");
      out.base = expect(items[i + 1], NodeType::kString, "string").text;
      i += 2;
      continue;
    }
    if (std::find(allowed.begin(), allowed.end(), key.text) == allowed.end())
      syntax(key, "unknown keyword :" + key.text);
    if (out.pairs.count(key.text)) syntax(key, "duplicate keyword :" + key.text);
    if (i + 2 >= items.size())
      syntax(key, "keyword :" + key.text + " needs two numbers");
    const double lo = expect(items[i + 1], NodeType::kNumber, "number").number;
    const double hi = expect(items[i + 2], NodeType::kNumber, "number").number;
    out.pairs[key.text] = {lo, hi};
    i += 3;
  }
  for (const auto& k : allowed)
    if (!out.pairs.count(k)) syntax(list, "missing :" + k);
  return out;
}

TextureSpec parse_texture(const Node& n) {
  const std::string& head = head_symbol(n, "(fractal ...) or (jitter ...)");
  TextureSpec t;
  if (head == "fractal") {
    t.mode = TextureMode::kFractal;
  } else if (head == "jitter") {
    t.mode = TextureMode::kJitter;
  } else {
    syntax(n.items.front(), "unknown texture mode '" + head + "'");
  }
  PairForm f = pair_form(n, {"h", "s", "v"}, true);
  t.base_name = f.base;
  std::tie(t.h_min, t.h_max) = f.pairs["h"];
  std::tie(t.s_min, t.s_max) = f.pairs["s"];
  std::tie(t.v_min, t.v_max) = f.pairs["v"];
  return t;
}

SpatialRegion parse_region(const Node& n) {
  if (head_symbol(n, "(union (bbox ...) ...)") != "union")
    syntax(n.items.front(), "expected 'union'");
  SpatialRegion region;
  for (std::size_t i = 1; i < n.items.size(); ++i) {
    const Node& b = n.items[i];
    if (head_symbol(b, "(bbox x0 y0 x1 y1)") != "bbox")
      syntax(b.items.front(), "expected 'bbox'");
    if (b.items.size() != 5) syntax(b, "bbox takes exactly 4 numbers");
    std::array<double, 4> v{};
    for (std::size_t k = 0; k < 4; ++k)
      v[k] = expect(b.items[k + 1], NodeType::kNumber, "number").number;
    region.boxes.push_back({v[0], v[1], v[2], v[3]});
  }
  if (region.boxes.empty()) syntax(n, "union needs at least one bbox");
  return region;
}

CameraPoseRange parse_camera(const Node& n) {
  if (head_symbol(n, "(union (sph ...) ...)") != "union")
    syntax(n.items.front(), "expected 'union'");
  CameraPoseRange cam;
  for (std::size_t i = 1; i < n.items.size(); ++i) {
    const Node& s = n.items[i];
    if (head_symbol(s, "(sph :r .. :theta .. :phi ..)") != "sph")
      syntax(s.items.front(), "expected 'sph'");
    PairForm f = pair_form(s, {"r", "theta", "phi"}, false);
    CameraRange c;
    std::tie(c.r_min, c.r_max) = f.pairs["r"];
    std::tie(c.theta_min, c.theta_max) = f.pairs["theta"];
    std::tie(c.phi_min, c.phi_max) = f.pairs["phi"];
    cam.ranges.push_back(c);
  }
  if (cam.ranges.empty()) syntax(n, "union needs at least one sph");
  return cam;
}

PredicateSequence parse_goal(const Node& n) {
  if (head_symbol(n, "(sequence ...)") != "sequence")
    syntax(n.items.front(), "expected 'sequence'");
  PredicateSequence seq;
  for (std::size_t i = 1; i < n.items.size(); ++i) {
    const Node& p = n.items[i];
    if (p.is(NodeType::kSymbol)) {
      auto kind = primitive_from_name(p.text);
      if (!kind) syntax(p, "unknown primitive '" + p.text + "'");
      seq.primitives.push_back({*kind, {}});
    } else if (p.is(NodeType::kList)) {
      if (head_symbol(p, "(custom \"label\")") != "custom" || p.items.size() != 2)
        syntax(p, "expected (custom \"label\")");
      const Node& label = expect(p.items[1], NodeType::kString, "string");
      if (label.text.empty()) range(label, "goal", "custom label is empty");
      seq.primitives.push_back({PrimitiveKind::kCustom, label.text});
    } else {
      syntax(p, "expected primitive");
    }
  }
  if (seq.primitives.empty()) range(n, "goal", "goal sequence is empty");
  return seq;
}

void check_texture(const TextureSpec& t, const std::string& field) {
  const bool fractal = t.mode == TextureMode::kFractal;
  const double lo = fractal ? 0.0 : -1.0;
  for (double v : {t.h_min, t.h_max, t.s_min, t.s_max, t.v_min, t.v_max}) {
    if (!(v >= lo && v <= 1.0))
      throw RangeError(field, "HSV bound " + sexpr::format_number(v) +
                                  " outside [" + sexpr::format_number(lo) + ",1]");
  }
  if (t.s_min > t.s_max) throw RangeError(field, "s_min > s_max");
  if (t.v_min > t.v_max) throw RangeError(field, "v_min > v_max");
  if (fractal) {
    if (t.base_name) throw RangeError(field, "fractal texture takes no :base");
  } else {
    if (!t.base_name || t.base_name->empty())
      throw RangeError(field, "jitter texture requires :base");
    if (t.h_min > t.h_max) throw RangeError(field, "h_min > h_max");
  }
}

void check_region(const SpatialRegion& r, const std::string& field) {
  if (r.boxes.empty()) throw RangeError(field, "region has no boxes");
  for (const auto& b : r.boxes) {
    for (double v : {b.x0, b.y0, b.x1, b.y1})
      if (!std::isfinite(v)) throw RangeError(field, "non-finite coordinate");
    if (b.x0 > b.x1) throw RangeError(field, "x1 < x0");
    if (b.y0 > b.y1) throw RangeError(field, "y1 < y0");
  }
}

void check_camera(const CameraPoseRange& cam) {
  const std::string field = "camera";
  if (cam.ranges.empty()) throw RangeError(field, "no camera ranges");
  for (const auto& c : cam.ranges) {
    if (!(c.r_min > 0)) throw RangeError(field, "r_min must be > 0");
    if (c.r_min > c.r_max) throw RangeError(field, "r_min > r_max");
    if (c.theta_min < 0 || c.theta_max > 90)
      throw RangeError(field, "theta outside [0,90]");
    if (c.theta_min > c.theta_max) throw RangeError(field, "theta_min > theta_max");
    if (c.phi_min < -180 || c.phi_max > 180)
      throw RangeError(field, "phi outside [-180,180]");
    if (c.phi_min > c.phi_max) throw RangeError(field, "phi_min > phi_max");
  }
}

/// Re-throws a RangeError from `check` with the position of `at` attached.
template <typename F>
void checked_at(const Node& at, F&& check) {
  try {
    check();
  } catch (RangeError& e) {
    e.line = at.line;
    e.column = at.column;
    throw;
  }
}

std::string texture_text(const TextureSpec& t) {
  using sexpr::format_number;
  std::ostringstream os;
  os << (t.mode == TextureMode::kFractal ? "(fractal" : "(jitter");
  if (t.base_name) os << " :base " << sexpr::quote(*t.base_name);
  os << " :h " << format_number(t.h_min) << ' ' << format_number(t.h_max)
     << " :s " << format_number(t.s_min) << ' ' << format_number(t.s_max)
     << " :v " << format_number(t.v_min) << ' ' << format_number(t.v_max) << ')';
  return os.str();
}

std::string region_text(const SpatialRegion& r) {
  using sexpr::format_number;
  std::ostringstream os;
  os << "(union";
  for (const auto& b : r.boxes)
    os << " (bbox " << format_number(b.x0) << ' ' << format_number(b.y0) << ' '
       << format_number(b.x1) << ' ' << format_number(b.y1) << ')';
  os << ')';
  return os.str();
}

double sample_hue(SplitMix64& rng, double lo, double hi, bool wraps) {
  if (!wraps) return rng.uniform(lo, hi);
  const double span = (1.0 - lo) + hi;
  double h = lo + span * rng.uniform();
  if (h >= 1.0) h = std::min(h - 1.0, hi);
  return h;
}

Hsv sample_hsv(SplitMix64& rng, const TextureSpec& t) {
  Hsv out;
  out.h = sample_hue(rng, t.h_min, t.h_max, t.hue_wraps());
  out.s = rng.uniform(t.s_min, t.s_max);
  out.v = rng.uniform(t.v_min, t.v_max);
  return out;
}

Vec2 sample_region(SplitMix64& rng, const SpatialRegion& region) {
  const double total = region.raw_area();
  const Box2* chosen = nullptr;
  if (total > 0) {
    const double u = rng.uniform() * total;
    double acc = 0;
    for (const auto& b : region.boxes) {
      if (b.area() <= 0) continue;
      chosen = &b;
      acc += b.area();
      if (u < acc) break;
    }
  } else {
    const Box2& first = region.boxes.front();
    for (const auto& b : region.boxes)
      if (!(b == first))
        throw DegenerateRegion("region has zero area and distinct degenerate boxes");
    chosen = &first;
  }
  return {rng.uniform(chosen->x0, chosen->x1), rng.uniform(chosen->y0, chosen->y1)};
}

bool hsv_within(const TextureSpec& t, const Hsv& c) {
  const bool h_ok = t.mode == TextureMode::kFractal
                        ? hue_in_range(c.h, t.h_min, t.h_max)
                        : (t.h_min <= c.h && c.h <= t.h_max);
  return h_ok && t.s_min <= c.s && c.s <= t.s_max && t.v_min <= c.v &&
         c.v <= t.v_max;
}

}  // namespace

double SpatialRegion::raw_area() const {
  double total = 0;
  for (const auto& b : boxes) total += b.area();
  return total;
}

bool SpatialRegion::contains(double x, double y) const {
  return std::any_of(boxes.begin(), boxes.end(),
                     [&](const Box2& b) { return b.contains(x, y); });
}

std::string Primitive::name() const {
  if (kind == PrimitiveKind::kCustom) return label;
  for (const auto& [k, n] : kPrimitiveNames)
    if (k == kind) return std::string(n);
  return {};
}

std::optional<PrimitiveKind> primitive_from_name(std::string_view name) {
  for (const auto& [k, n] : kPrimitiveNames)
    if (n == name) return k;
  return std::nullopt;
}

TaskSpec parse(std::string_view source) {
  const Node root = sexpr::read_one(source);
  if (!root.is(NodeType::kList) || root.items.empty() ||
      !root.items.front().is_symbol("task"))
    syntax(root, "expected (task ...)");

  TaskSpec spec;
  bool has_receptacle = false;
  const Node* receptacle_region_node = nullptr;
  std::map<std::string, const Node*> seen;
  for (const auto& [key, value] : sexpr::keyword_fields(root, 1)) {
    const std::string& k = key->text;
    const Node& v = *value;
    seen[k] = &v;
    if (k == "name") {
      spec.name = expect(v, NodeType::kString, "string").text;
    } else if (k == "lab") {
      spec.lab = expect(v, NodeType::kString, "string").text;
    } else if (k == "goal") {
      spec.goal = parse_goal(v);
    } else if (k == "object") {
      spec.object_name = expect(v, NodeType::kString, "string").text;
    } else if (k == "object-texture") {
      spec.object_texture = parse_texture(v);
      checked_at(v, [&] { check_texture(spec.object_texture, "object_texture"); });
    } else if (k == "object-region") {
      spec.object_region = parse_region(v);
      checked_at(v, [&] { check_region(spec.object_region, "object_region"); });
    } else if (k == "receptacle") {
      spec.receptacle_name = expect(v, NodeType::kString, "string").text;
      has_receptacle = true;
    } else if (k == "receptacle-region") {
      spec.receptacle_region = parse_region(v);
      receptacle_region_node = &v;
      checked_at(v, [&] { check_region(*spec.receptacle_region, "receptacle_region"); });
    } else if (k == "camera") {
      spec.camera_range = parse_camera(v);
      checked_at(v, [&] { check_camera(spec.camera_range); });
    } else if (k == "table-texture") {
      spec.table_texture = parse_texture(v);
      checked_at(v, [&] { check_texture(spec.table_texture, "table_texture"); });
    } else if (k == "instruction") {
      spec.instruction = expect(v, NodeType::kString, "string").text;
    } else {
      syntax(*key, "unknown keyword :" + k);
    }
  }
  for (const char* required : {"name", "lab", "goal", "object", "object-texture",
                               "object-region", "camera", "table-texture",
                               "instruction"}) {
    if (!seen.count(required)) syntax(root, std::string("missing :") + required);
  }
  if (has_receptacle != (receptacle_region_node != nullptr))
    syntax(root, ":receptacle and :receptacle-region must appear together");
  checked_at(*seen["name"], [&] {
    if (spec.name.empty()) throw RangeError("name", "name is empty");
  });
  return spec;
}

void validate(const TaskSpec& spec) {
  if (spec.name.empty()) throw RangeError("name", "name is empty");
  if (spec.goal.primitives.empty()) throw RangeError("goal", "goal sequence is empty");
  for (const auto& p : spec.goal.primitives)
    if (p.kind == PrimitiveKind::kCustom && p.label.empty())
      throw RangeError("goal", "custom label is empty");
  check_texture(spec.object_texture, "object_texture");
  check_texture(spec.table_texture, "table_texture");
  check_region(spec.object_region, "object_region");
  if (spec.receptacle_name.has_value() != spec.receptacle_region.has_value())
    throw RangeError("receptacle_region", "receptacle name and region must appear together");
  if (spec.receptacle_region) check_region(*spec.receptacle_region, "receptacle_region");
  check_camera(spec.camera_range);
}

std::string serialize(const TaskSpec& spec) {
  using sexpr::format_number;
  using sexpr::quote;
  std::ostringstream os;
  os << "(task :name " << quote(spec.name) << " :lab " << quote(spec.lab) << '\n';
  os << "  :goal (sequence";
  for (const auto& p : spec.goal.primitives) {
    if (p.kind == PrimitiveKind::kCustom)
      os << " (custom " << quote(p.label) << ')';
    else
      os << ' ' << p.name();
  }
  os << ")\n";
  os << "  :object " << quote(spec.object_name) << '\n';
  os << "  :object-texture " << texture_text(spec.object_texture) << '\n';
  os << "  :object-region " << region_text(spec.object_region) << '\n';
  if (spec.receptacle_name && spec.receptacle_region) {
    os << "  :receptacle " << quote(*spec.receptacle_name) << '\n';
    os << "  :receptacle-region " << region_text(*spec.receptacle_region) << '\n';
  }
  os << "  :camera (union";
  for (const auto& c : spec.camera_range.ranges)
    os << " (sph :r " << format_number(c.r_min) << ' ' << format_number(c.r_max)
       << " :theta " << format_number(c.theta_min) << ' ' << format_number(c.theta_max)
       << " :phi " << format_number(c.phi_min) << ' ' << format_number(c.phi_max) << ')';
  os << ")\n";
  os << "  :table-texture " << texture_text(spec.table_texture) << '\n';
  os << "  :instruction " << quote(spec.instruction) << ")\n";
  return os.str();
}

TaskInstance sample_instance(const TaskSpec& spec, std::uint64_t seed) {
  SplitMix64 rng(seed);
  TaskInstance inst;
  inst.spec_name = spec.name;
  inst.seed = seed;
  inst.object_pose = sample_region(rng, spec.object_region);
  if (spec.receptacle_region) inst.receptacle_pose = sample_region(rng, *spec.receptacle_region);
  const auto& ranges = spec.camera_range.ranges;
  const CameraRange& c = ranges[rng.below(ranges.size())];
  inst.camera_pose = {rng.uniform(c.r_min, c.r_max),
                      rng.uniform(c.theta_min, c.theta_max),
                      rng.uniform(c.phi_min, c.phi_max)};
  inst.object_hsv = sample_hsv(rng, spec.object_texture);
  inst.table_hsv = sample_hsv(rng, spec.table_texture);
  return inst;
}

bool hue_in_range(double h, double lo, double hi) {
  if (lo <= hi) return lo <= h && h <= hi;
  return (lo <= h && h < 1.0) || (0.0 <= h && h <= hi);
}

bool instance_within(const TaskSpec& spec, const TaskInstance& inst) {
  if (!spec.object_region.contains(inst.object_pose.x, inst.object_pose.y)) return false;
  if (spec.receptacle_region.has_value() != inst.receptacle_pose.has_value()) return false;
  if (inst.receptacle_pose &&
      !spec.receptacle_region->contains(inst.receptacle_pose->x, inst.receptacle_pose->y))
    return false;
  const auto& p = inst.camera_pose;
  const bool cam_ok = std::any_of(
      spec.camera_range.ranges.begin(), spec.camera_range.ranges.end(),
      [&](const CameraRange& c) {
        return c.r_min <= p.r && p.r <= c.r_max && c.theta_min <= p.theta &&
               p.theta <= c.theta_max && c.phi_min <= p.phi && p.phi <= c.phi_max;
      });
  return cam_ok && hsv_within(spec.object_texture, inst.object_hsv) &&
         hsv_within(spec.table_texture, inst.table_hsv);
}

}  // namespace dvkit::taskspec
