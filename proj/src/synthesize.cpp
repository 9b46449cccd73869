#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "dvkit/genkit.hpp"

namespace dvkit::genkit {

using metadata::DemoRecord;
using metadata::Quat;
using metadata::Step;
using metadata::Vec3;

namespace {

constexpr double kUnitTolerance = 1e-6;

Eigen::Vector3d ev(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 mv(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
Eigen::Quaterniond eq(const Quat& q) { return {q.w, q.x, q.y, q.z}; }
Quat mq(const Eigen::Quaterniond& q) { return {q.w(), q.x(), q.y(), q.z()}; }

void check_unit(const Quat& q, const std::string& what) {
  if (std::abs(q.norm() - 1.0) > kUnitTolerance)
    throw DegenerateAnchor(what + " quaternion is not unit (norm " + std::to_string(q.norm()) + ")");
}

double distance(const Vec3& a, const Vec3& b) { return (ev(a) - ev(b)).norm(); }

}  // namespace

RigidPose compose(const RigidPose& a, const RigidPose& b) {
  const Eigen::Quaterniond qa = eq(a.quat);
  return {mv(ev(a.pos) + qa * ev(b.pos)), mq((qa * eq(b.quat)).normalized())};
}

RigidPose inverse(const RigidPose& a) {
  const Eigen::Quaterniond qi = eq(a.quat).conjugate();
  return {mv(-(qi * ev(a.pos))), mq(qi)};
}

std::vector<Segment> decompose(const DemoRecord& demo, const taskspec::PredicateSequence& goal) {
  if (goal.primitives.empty()) throw RangeError("goal", "goal sequence is empty");
  if (demo.steps.empty()) throw RangeError("steps", "demo has no steps");
  const auto smoothed = metadata::smooth_gripper(demo.steps);
  const auto transitions = metadata::gripper_transitions(smoothed);
  if (transitions.size() != goal.primitives.size())
    throw SegmentationMismatch(transitions.size(), goal.primitives.size());

  std::vector<Segment> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k < transitions.size(); ++k) {
    const bool last = k + 1 == transitions.size();
    const std::size_t t = transitions[k].index;
    const std::size_t end = last ? demo.steps.size() : t + 1;
    Segment s;
    s.object_anchor = {demo.steps[t].ee_pos, demo.steps[t].ee_quat};
    s.steps.assign(demo.steps.begin() + static_cast<std::ptrdiff_t>(start),
                   demo.steps.begin() + static_cast<std::ptrdiff_t>(end));
    s.primitive = goal.primitives[k].name();
    s.first_step = start;
    out.push_back(std::move(s));
    start = end;
  }
  return out;
}

DemoRecord synthesize(std::span<const Segment> segments, std::span<const RigidPose> new_anchors,
                      double bridge_step, const DemoRecord& base) {
  if (segments.size() != new_anchors.size())
    throw RangeError("anchors", std::to_string(new_anchors.size()) + " anchors for " +
                                    std::to_string(segments.size()) + " segments");
  if (!(bridge_step > 0)) throw RangeError("bridge_step", "must be positive");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    check_unit(segments[i].object_anchor.quat, "segment " + std::to_string(i) + " anchor");
    check_unit(new_anchors[i].quat, "new anchor " + std::to_string(i));
    if (segments[i].steps.empty())
      throw RangeError("segments", "segment " + std::to_string(i) + " has no steps");
  }

  DemoRecord out = base;
  out.annotations.reset();
  out.steps.clear();
  const Step* prev_source = nullptr;

  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& seg = segments[i];
    const bool identity = new_anchors[i] == seg.object_anchor;
    const RigidPose transform = compose(new_anchors[i], inverse(seg.object_anchor));
    const Eigen::Quaterniond rq = eq(transform.quat);
    const Eigen::Vector3d rt = ev(transform.pos);

    std::vector<Step> mapped = seg.steps;
    if (!identity) {
      for (Step& s : mapped) {
        s.ee_pos = mv(rq * ev(s.ee_pos) + rt);
        s.ee_quat = mq((rq * eq(s.ee_quat)).normalized());
      }
    }

    if (!out.steps.empty()) {
      const Step a = out.steps.back();
      const Step& b = mapped.front();
      const double gap = distance(a.ee_pos, b.ee_pos);
      const double source_gap = distance(prev_source->ee_pos, seg.steps.front().ee_pos);
      if (gap > std::max(bridge_step, source_gap)) {
        const auto n = static_cast<std::size_t>(std::ceil(gap / bridge_step));
        const Eigen::Vector3d pa = ev(a.ee_pos), pb = ev(b.ee_pos);
        const Eigen::Quaterniond qa = eq(a.ee_quat), qb = eq(b.ee_quat);
        for (std::size_t k = 1; k < n; ++k) {
          const double f = static_cast<double>(k) / static_cast<double>(n);
          Step s = a;
          s.ee_pos = mv(pa + f * (pb - pa));
          s.ee_quat = mq(qa.slerp(f, qb).normalized());
          out.steps.push_back(s);
        }
      }
    }
    prev_source = &seg.steps.back();
    out.steps.insert(out.steps.end(), mapped.begin(), mapped.end());
  }

  for (std::size_t i = 0; i < out.steps.size(); ++i) out.steps[i].t = static_cast<std::int64_t>(i);
  return out;
}

}  // namespace dvkit::genkit
