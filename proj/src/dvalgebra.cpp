#include "dvkit/dvalgebra.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <sstream>

namespace dvkit::dvalgebra {

namespace {

using Axes = std::vector<std::size_t>;

/// Segment tree over compressed coordinates: range add of cover counts and
/// total covered length.
class CoverTree {
 public:
  explicit CoverTree(std::vector<double> coords)
      : xs_(std::move(coords)), count_(4 * xs_.size()), len_(4 * xs_.size()) {}

  void add(double lo, double hi, int delta) {
    const auto l = index_of(lo);
    const auto r = index_of(hi);
    if (l < r) update(1, 0, xs_.size() - 1, l, r, delta);
  }
  double covered() const { return xs_.size() < 2 ? 0.0 : len_[1]; }

 private:
  std::size_t index_of(double v) const {
    return static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), v) - xs_.begin());
  }

  // Node covers elementary segments [l, r) i.e. coordinates xs_[l]..xs_[r].
  void update(std::size_t node, std::size_t l, std::size_t r, std::size_t ql, std::size_t qr,
              int delta) {
    if (qr <= l || r <= ql) return;
    if (ql <= l && r <= qr) {
      count_[node] += delta;
    } else {
      const std::size_t mid = (l + r) / 2;
      update(2 * node, l, mid, ql, qr, delta);
      update(2 * node + 1, mid, r, ql, qr, delta);
    }
    if (count_[node] > 0) {
      len_[node] = xs_[r] - xs_[l];
    } else if (r - l == 1) {
      len_[node] = 0;
    } else {
      len_[node] = len_[2 * node] + len_[2 * node + 1];
    }
  }

  std::vector<double> xs_;
  std::vector<int> count_;
  std::vector<double> len_;
};

bool degenerate_on(const Box& b, const Axes& axes) {
  return std::any_of(axes.begin(), axes.end(), [&](auto a) { return !(b.lo[a] < b.hi[a]); });
}

double measure_1d(std::vector<const Box*> boxes, std::size_t a) {
  std::sort(boxes.begin(), boxes.end(), [a](auto* p, auto* q) { return p->lo[a] < q->lo[a]; });
  double total = 0;
  double cur_lo = 0, cur_hi = 0;
  bool open = false;
  for (const Box* b : boxes) {
    if (!open || b->lo[a] > cur_hi) {
      if (open) total += cur_hi - cur_lo;
      cur_lo = b->lo[a];
      cur_hi = b->hi[a];
      open = true;
    } else {
      cur_hi = std::max(cur_hi, b->hi[a]);
    }
  }
  if (open) total += cur_hi - cur_lo;
  return total;
}

double measure_2d(const std::vector<const Box*>& boxes, std::size_t ax, std::size_t ay) {
  struct Event {
    double x;
    int delta;
    const Box* box;
  };
  std::vector<Event> events;
  std::vector<double> ys;
  for (const Box* b : boxes) {
    events.push_back({b->lo[ax], +1, b});
    events.push_back({b->hi[ax], -1, b});
    ys.push_back(b->lo[ay]);
    ys.push_back(b->hi[ay]);
  }
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::sort(events.begin(), events.end(), [](const Event& p, const Event& q) { return p.x < q.x; });
  CoverTree tree(std::move(ys));
  double area = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0) area += tree.covered() * (events[i].x - events[i - 1].x);
    tree.add(events[i].box->lo[ay], events[i].box->hi[ay], events[i].delta);
  }
  return area;
}

/// Measure of the union over `axes`; boxes with zero extent on any axis are
/// skipped by the caller.
double measure(const std::vector<const Box*>& boxes, const Axes& axes) {
  if (boxes.empty()) return 0.0;
  if (axes.size() == 1) return measure_1d(boxes, axes[0]);
  if (axes.size() == 2) return measure_2d(boxes, axes[0], axes[1]);
  const std::size_t a = axes.front();
  const Axes rest(axes.begin() + 1, axes.end());
  std::vector<double> cuts;
  for (const Box* b : boxes) {
    cuts.push_back(b->lo[a]);
    cuts.push_back(b->hi[a]);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    std::vector<const Box*> active;
    for (const Box* b : boxes)
      if (b->lo[a] <= cuts[i] && b->hi[a] >= cuts[i + 1]) active.push_back(b);
    total += (cuts[i + 1] - cuts[i]) * measure(active, rest);
  }
  return total;
}

/// Is the closed box `t` (restricted to `axes`) inside the union of `cover`?
/// Uses only comparisons, no arithmetic on coordinates.
bool covered(const Box& t, std::vector<const Box*> cover, Axes axes) {
  // Drop degenerate axes: keep only boxes that contain the fixed coordinate.
  for (auto it = axes.begin(); it != axes.end();) {
    const std::size_t a = *it;
    if (t.lo[a] == t.hi[a]) {
      const double v = t.lo[a];
      std::erase_if(cover, [&](const Box* b) { return !(b->lo[a] <= v && v <= b->hi[a]); });
      it = axes.erase(it);
    } else {
      ++it;
    }
  }
  if (cover.empty()) return false;
  if (axes.empty()) return true;

  const std::size_t a = axes.front();
  if (axes.size() == 1) {
    std::sort(cover.begin(), cover.end(), [a](auto* p, auto* q) { return p->lo[a] < q->lo[a]; });
    double reach = t.lo[a];
    for (const Box* b : cover) {
      if (b->lo[a] > reach) return false;
      reach = std::max(reach, b->hi[a]);
      if (reach >= t.hi[a]) return true;
    }
    return reach >= t.hi[a];
  }

  const Axes rest(axes.begin() + 1, axes.end());
  std::vector<double> cuts{t.lo[a], t.hi[a]};
  for (const Box* b : cover) {
    if (t.lo[a] < b->lo[a] && b->lo[a] < t.hi[a]) cuts.push_back(b->lo[a]);
    if (t.lo[a] < b->hi[a] && b->hi[a] < t.hi[a]) cuts.push_back(b->hi[a]);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  // Every open slab must be covered; closure then covers the slab walls.
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    std::vector<const Box*> active;
    for (const Box* b : cover)
      if (b->lo[a] <= cuts[i] && b->hi[a] >= cuts[i + 1]) active.push_back(b);
    if (!covered(t, std::move(active), rest)) return false;
  }
  return true;
}

bool touches(const Box& a, const Box& b, const Axes& axes) {
  return std::all_of(axes.begin(), axes.end(),
                     [&](auto k) { return a.lo[k] <= b.hi[k] && b.lo[k] <= a.hi[k]; });
}

Axes axes_of(const DVSupport& s) {
  Axes axes(s.dims());
  std::iota(axes.begin(), axes.end(), 0);
  return axes;
}

double cell_floor(double v, double cell) { return std::floor(v / cell); }

Box grid_cell_2d(double x, double y, double cell) {
  const double i = cell_floor(x, cell), j = cell_floor(y, cell);
  return Box::planar(i * cell, j * cell, (i + 1) * cell, (j + 1) * cell);
}

nlohmann::json box_json(const Box& b, std::size_t dims) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t a = 0; a < dims; ++a) arr.push_back(b.lo[a]);
  for (std::size_t a = 0; a < dims; ++a) arr.push_back(b.hi[a]);
  return arr;
}

}  // namespace

std::string_view kind_name(SupportKind k) {
  switch (k) {
    case SupportKind::kInterval2d: return "interval2d";
    case SupportKind::kInterval3d: return "interval3d";
    case SupportKind::kAngular: return "angular";
    case SupportKind::kDiscrete: return "discrete";
  }
  return "?";
}

std::optional<SupportKind> kind_from_name(std::string_view name) {
  for (auto k : {SupportKind::kInterval2d, SupportKind::kInterval3d, SupportKind::kAngular,
                 SupportKind::kDiscrete})
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

Box Box::planar(double x0, double y0, double x1, double y1) {
  return Box{{x0, y0, 0.0}, {x1, y1, 0.0}};
}

Box Box::spatial(std::array<double, 3> lo, std::array<double, 3> hi) { return Box{lo, hi}; }

Box Box::angular(double theta0, double phi0, double theta1, double phi1) {
  return Box{{theta0, phi0, 0.0}, {theta1, phi1, 0.0}};
}

DVSupport DVSupport::planar(std::vector<Box> boxes) {
  DVSupport s(SupportKind::kInterval2d);
  for (const auto& b : boxes) s.add(b);
  return s;
}

DVSupport DVSupport::spatial(std::vector<Box> boxes) {
  DVSupport s(SupportKind::kInterval3d);
  for (const auto& b : boxes) s.add(b);
  return s;
}

DVSupport DVSupport::angular(std::vector<Box> windows) {
  DVSupport s(SupportKind::kAngular);
  for (const auto& b : windows) s.add(b);
  return s;
}

DVSupport DVSupport::discrete(std::set<std::string> labels) {
  DVSupport s(SupportKind::kDiscrete);
  s.labels_ = std::move(labels);
  return s;
}

std::size_t DVSupport::dims() const {
  switch (kind_) {
    case SupportKind::kInterval2d:
    case SupportKind::kAngular: return 2;
    case SupportKind::kInterval3d: return 3;
    case SupportKind::kDiscrete: return 0;
  }
  return 0;
}

void DVSupport::add(const Box& b) {
  if (kind_ == SupportKind::kDiscrete) throw KindMismatch(kind_, SupportKind::kInterval2d);
  for (std::size_t a = 0; a < dims(); ++a) {
    if (!std::isfinite(b.lo[a]) || !std::isfinite(b.hi[a]))
      throw RangeError("support", "non-finite box coordinate");
    if (b.lo[a] > b.hi[a]) throw RangeError("support", "box lower bound exceeds upper bound");
  }
  Box clean = b;
  for (std::size_t a = dims(); a < 3; ++a) clean.lo[a] = clean.hi[a] = 0.0;
  boxes_.push_back(clean);
}

void DVSupport::add(std::string label) {
  if (kind_ != SupportKind::kDiscrete) throw KindMismatch(kind_, SupportKind::kDiscrete);
  labels_.insert(std::move(label));
}

void DVSupport::canonicalize() {
  std::sort(boxes_.begin(), boxes_.end());
  boxes_.erase(std::unique(boxes_.begin(), boxes_.end()), boxes_.end());
}

double support_size(const DVSupport& s) {
  if (s.kind() == SupportKind::kDiscrete) return static_cast<double>(s.labels().size());
  const Axes axes = axes_of(s);
  std::vector<const Box*> solid;
  for (const auto& b : s.boxes())
    if (!degenerate_on(b, axes)) solid.push_back(&b);
  return measure(solid, axes);
}

bool is_aligned(const DVSupport& target, const DVSupport& cotrain) {
  if (target.kind() != cotrain.kind()) throw KindMismatch(target.kind(), cotrain.kind());
  if (target.kind() == SupportKind::kDiscrete)
    return std::includes(cotrain.labels().begin(), cotrain.labels().end(),
                         target.labels().begin(), target.labels().end());
  const Axes axes = axes_of(target);
  for (const Box& t : target.boxes()) {
    std::vector<const Box*> near;
    for (const Box& c : cotrain.boxes())
      if (touches(t, c, axes)) near.push_back(&c);
    if (!covered(t, std::move(near), axes)) return false;
  }
  return true;
}

std::string_view case_name(CaseLabel c) {
  switch (c) {
    case CaseLabel::kNotDiverseMisaligned: return "not_diverse_misaligned";
    case CaseLabel::kDiverseMisaligned: return "diverse_misaligned";
    case CaseLabel::kDiverseAligned: return "diverse_aligned";
    case CaseLabel::kNotDiverseAligned: return "not_diverse_aligned";
  }
  return "?";
}

Classification classify(const DVSupport& target, const DVSupport& cotrain, double rho) {
  if (target.kind() != cotrain.kind()) throw KindMismatch(target.kind(), cotrain.kind());
  if (!(rho > 1.0)) throw RangeError("rho", "diversity ratio threshold must exceed 1");
  Classification c{};
  c.target_size = support_size(target);
  c.cotrain_size = support_size(cotrain);
  if (c.target_size == 0.0) {
    c.zero_target = c.cotrain_size > 0.0;
    c.diverse = c.zero_target;
  } else {
    c.diverse = c.cotrain_size >= rho * c.target_size;
  }
  c.aligned = is_aligned(target, cotrain);
  if (c.aligned)
    c.label = c.diverse ? CaseLabel::kDiverseAligned : CaseLabel::kNotDiverseAligned;
  else
    c.label = c.diverse ? CaseLabel::kDiverseMisaligned : CaseLabel::kNotDiverseMisaligned;
  return c;
}

CaseLabel classify_case(const DVSupport& target, const DVSupport& cotrain, double rho) {
  return classify(target, cotrain, rho).label;
}

const DVSupport& DatasetProfile::at(std::string_view dv) const {
  auto it = supports.find(std::string(dv));
  if (it == supports.end()) throw Error("UnknownDv", "no support for DV '" + std::string(dv) + "'");
  return it->second;
}

DatasetProfile profile_dataset(std::span<const metadata::DemoRecord> records,
                               const ProfileOptions& options) {
  if (records.empty()) throw EmptyDataset();
  if (!(options.spatial_cell > 0) || !(options.angular_cell_deg > 0))
    throw RangeError("cell", "profile cell sizes must be positive");

  DatasetProfile p;
  p.options = options;
  p.demo_count = records.size();
  DVSupport cam_pose(SupportKind::kDiscrete), cam_angle(SupportKind::kAngular),
      obj_tex(SupportKind::kDiscrete), table_tex(SupportKind::kDiscrete),
      obj_spat(SupportKind::kInterval2d), recep_spat(SupportKind::kInterval2d),
      motion(SupportKind::kDiscrete), scene(SupportKind::kDiscrete);

  const double ac = options.angular_cell_deg;
  for (const auto& r : records) {
    if (!r.lab.empty()) scene.add(r.lab);
    try {
      const auto s = metadata::to_spherical(r.camera_extrinsics.pos, options.table_center);
      const double i = cell_floor(s.theta_deg, ac), j = cell_floor(s.phi_deg, ac);
      cam_angle.add(Box::angular(i * ac, j * ac, (i + 1) * ac, (j + 1) * ac));
    } catch (const metadata::DegeneratePose&) {
    }
    if (!r.annotations) continue;
    const auto& a = *r.annotations;
    if (a.camera_bin && *a.camera_bin != metadata::kUnbinned) cam_pose.add(*a.camera_bin);
    if (a.object_color) obj_tex.add(*a.object_color);
    if (a.table_color) table_tex.add(*a.table_color);
    if (a.object_position)
      obj_spat.add(grid_cell_2d(a.object_position->x, a.object_position->y, options.spatial_cell));
    if (a.receptacle_position)
      recep_spat.add(
          grid_cell_2d(a.receptacle_position->x, a.receptacle_position->y, options.spatial_cell));
    for (const auto& m : a.motion) motion.add(m);
  }
  for (DVSupport* s : {&cam_angle, &obj_spat, &recep_spat}) s->canonicalize();
  p.supports = {{"camPose", cam_pose},   {"camAngle", cam_angle}, {"objTex", obj_tex},
                {"tableTex", table_tex}, {"objSpat", obj_spat},   {"recepSpat", recep_spat},
                {"motion", motion},      {"scene", scene}};
  return p;
}

DatasetProfile merge(const DatasetProfile& a, const DatasetProfile& b) {
  DatasetProfile out = a;
  out.demo_count = a.demo_count + b.demo_count;
  for (const auto& [name, sb] : b.supports) {
    auto it = out.supports.find(name);
    if (it == out.supports.end()) {
      out.supports.emplace(name, sb);
      continue;
    }
    DVSupport& sa = it->second;
    if (sa.kind() != sb.kind()) throw KindMismatch(sa.kind(), sb.kind());
    if (sa.kind() == SupportKind::kDiscrete) {
      for (const auto& l : sb.labels()) sa.add(l);
    } else {
      for (const auto& box : sb.boxes()) sa.add(box);
      sa.canonicalize();
    }
  }
  return out;
}

std::string profile_to_json(const DatasetProfile& p) {
  nlohmann::json j;
  j["demo_count"] = p.demo_count;
  j["options"] = {{"spatial_cell", p.options.spatial_cell},
                  {"angular_cell_deg", p.options.angular_cell_deg},
                  {"table_center",
                   {p.options.table_center.x, p.options.table_center.y, p.options.table_center.z}}};
  nlohmann::json sup = nlohmann::json::object();
  for (const auto& [name, s] : p.supports) {
    nlohmann::json e;
    e["kind"] = kind_name(s.kind());
    if (s.kind() == SupportKind::kDiscrete) {
      e["labels"] = s.labels();
    } else {
      nlohmann::json boxes = nlohmann::json::array();
      for (const auto& b : s.boxes()) boxes.push_back(box_json(b, s.dims()));
      e["boxes"] = std::move(boxes);
    }
    e["size"] = support_size(s);
    sup[name] = std::move(e);
  }
  j["supports"] = std::move(sup);
  return j.dump(2);
}

DatasetProfile profile_from_json(std::string_view text) {
  DatasetProfile p;
  try {
    const auto j = nlohmann::json::parse(text);
    p.demo_count = j.at("demo_count").get<std::size_t>();
    if (auto o = j.find("options"); o != j.end()) {
      p.options.spatial_cell = o->value("spatial_cell", 0.02);
      p.options.angular_cell_deg = o->value("angular_cell_deg", 5.0);
      if (auto c = o->find("table_center"); c != o->end() && c->size() == 3)
        p.options.table_center = {(*c)[0].get<double>(), (*c)[1].get<double>(),
                                  (*c)[2].get<double>()};
    }
    for (const auto& [name, e] : j.at("supports").items()) {
      const auto kind = kind_from_name(e.at("kind").get<std::string>());
      if (!kind) throw Error("SchemaError", "profile: unknown support kind for " + name);
      DVSupport s(*kind);
      if (*kind == SupportKind::kDiscrete) {
        for (const auto& l : e.at("labels")) s.add(l.get<std::string>());
      } else {
        const std::size_t d = s.dims();
        for (const auto& arr : e.at("boxes")) {
          if (arr.size() != 2 * d) throw Error("SchemaError", "profile: bad box arity in " + name);
          Box b;
          for (std::size_t a = 0; a < d; ++a) {
            b.lo[a] = arr[a].get<double>();
            b.hi[a] = arr[d + a].get<double>();
          }
          s.add(b);
        }
      }
      p.supports.emplace(name, std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("SchemaError", std::string("profile: ") + e.what());
  }
  if (p.demo_count == 0 &&
      std::any_of(p.supports.begin(), p.supports.end(), [](auto& kv) { return !kv.second.empty(); }))
    throw RangeError("demo_count", "non-empty supports with zero demos");
  return p;
}

std::string profile_report(const DatasetProfile& p) {
  std::ostringstream os;
  os << "demos: " << p.demo_count << "  (spatial_cell=" << p.options.spatial_cell
     << " m, angular_cell=" << p.options.angular_cell_deg << " deg)\n";
  for (const auto& name : kDvNames) {
    auto it = p.supports.find(std::string(name));
    if (it == p.supports.end()) continue;
    const DVSupport& s = it->second;
    os << "  " << name << " [" << kind_name(s.kind()) << "] size=" << support_size(s);
    if (s.kind() == SupportKind::kDiscrete) {
      os << " {";
      bool first = true;
      for (const auto& l : s.labels()) {
        os << (first ? "" : ", ") << l;
        first = false;
      }
      os << '}';
    } else {
      os << " boxes=" << s.boxes().size();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace dvkit::dvalgebra
