#include <algorithm>

#include "dvkit/metadata.hpp"

namespace dvkit::metadata {

std::vector<double> smooth_gripper(std::span<const Step> steps, std::size_t window) {
  const std::size_t n = steps.size();
  const std::size_t half = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0;
    for (std::size_t j = lo; j <= hi; ++j) sum += steps[j].gripper;
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<GripperTransition> gripper_transitions(std::span<const double> s,
                                                   double threshold) {
  std::vector<GripperTransition> out;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const bool was_closed = s[i - 1] >= threshold;
    const bool is_closed = s[i] >= threshold;
    if (was_closed != is_closed) out.push_back({i, is_closed});
  }
  return out;
}

std::optional<Vec3> extract_object_position(std::span<const Step> steps) {
  const auto smoothed = smooth_gripper(steps);
  for (const auto& tr : gripper_transitions(smoothed))
    if (tr.closing) return steps[tr.index].ee_pos;
  return std::nullopt;
}

std::optional<Vec3> extract_receptacle_position(std::span<const Step> steps) {
  const auto smoothed = smooth_gripper(steps);
  bool closed_once = false;
  for (const auto& tr : gripper_transitions(smoothed)) {
    if (tr.closing) {
      closed_once = true;
    } else if (closed_once) {
      return steps[tr.index].ee_pos;
    }
  }
  return std::nullopt;
}

}  // namespace dvkit::metadata
