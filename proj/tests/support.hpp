// Shared generators for the test binaries.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dvkit/metadata.hpp"
#include "dvkit/rng.hpp"
#include "dvkit/taskspec.hpp"

namespace dvkit::testing {

inline std::string fixture(const std::string& rel) { return std::string(DVKIT_FIXTURE_DIR) + "/" + rel; }
inline std::string data_file(const std::string& rel) { return std::string(DVKIT_DATA_DIR) + "/" + rel; }

inline metadata::Quat random_unit_quat(SplitMix64& rng) {
  // Gaussian via Box-Muller, then normalize.
  double v[4];
  for (double& x : v) {
    const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
    x = std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
  }
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
  return {v[0] / n, v[1] / n, v[2] / n, v[3] / n};
}

/// Demo with a gripper that closes at `close_at` and opens at `open_at`
/// (never, when past the end).
inline metadata::DemoRecord make_demo(const std::string& id, std::size_t n_steps,
                                      std::size_t close_at, std::size_t open_at) {
  metadata::DemoRecord r;
  r.id = id;
  r.lab = "lab1";
  r.instructions = {"pick the carrot and place it in the bin"};
  r.camera_extrinsics.pos = {0.5, 0.0, 0.7};
  for (std::size_t i = 0; i < n_steps; ++i) {
    metadata::Step s;
    s.t = static_cast<std::int64_t>(i);
    s.ee_pos = {0.3 + 0.002 * static_cast<double>(i), 0.1 * std::sin(0.05 * static_cast<double>(i)),
                0.2 + 0.001 * static_cast<double>(i)};
    s.gripper = (i >= close_at && i < open_at) ? 1.0 : 0.0;
    r.steps.push_back(s);
  }
  return r;
}

inline taskspec::TextureSpec random_fractal(SplitMix64& rng) {
  taskspec::TextureSpec t;
  t.mode = taskspec::TextureMode::kFractal;
  auto pair = [&](double& lo, double& hi) {
    double a = rng.uniform(), b = rng.uniform();
    if (rng.below(10) == 0) b = a;
    lo = std::min(a, b);
    hi = std::max(a, b);
  };
  // Hue is drawn independently so wrapped ranges (lo > hi) appear.
  t.h_min = rng.uniform();
  t.h_max = rng.below(8) == 0 ? t.h_min : rng.uniform();
  pair(t.s_min, t.s_max);
  pair(t.v_min, t.v_max);
  return t;
}

inline taskspec::TextureSpec random_jitter(SplitMix64& rng) {
  taskspec::TextureSpec t;
  t.mode = taskspec::TextureMode::kJitter;
  t.base_name = "base" + std::to_string(rng.below(5));
  auto pair = [&](double& lo, double& hi) {
    double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
    lo = std::min(a, b);
    hi = std::max(a, b);
  };
  pair(t.h_min, t.h_max);
  pair(t.s_min, t.s_max);
  pair(t.v_min, t.v_max);
  return t;
}

inline taskspec::SpatialRegion random_region(SplitMix64& rng) {
  taskspec::SpatialRegion r;
  const auto n = 1 + rng.below(4);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x0 = rng.uniform(-0.5, 0.5), y0 = rng.uniform(-0.5, 0.5);
    r.boxes.push_back({x0, y0, x0 + rng.uniform(0.01, 0.3), y0 + rng.uniform(0.01, 0.3)});
  }
  return r;
}

inline taskspec::TaskSpec random_spec(SplitMix64& rng) {
  using namespace taskspec;
  TaskSpec s;
  s.name = "task-" + std::to_string(rng.below(1000));
  s.lab = "lab" + std::to_string(1 + rng.below(8));
  const auto n = 1 + rng.below(4);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto k = rng.below(10);
    if (k == 9) s.goal.primitives.push_back({PrimitiveKind::kCustom, "custom" + std::to_string(i)});
    else s.goal.primitives.push_back({static_cast<PrimitiveKind>(k), ""});
  }
  s.object_name = "object";
  s.object_texture = rng.below(2) ? random_fractal(rng) : random_jitter(rng);
  s.object_region = random_region(rng);
  if (rng.below(2)) {
    s.receptacle_name = "bin";
    s.receptacle_region = random_region(rng);
  }
  const auto nc = 1 + rng.below(3);
  for (std::uint64_t i = 0; i < nc; ++i) {
    CameraRange c;
    c.r_min = rng.uniform(0.3, 1.0);
    c.r_max = c.r_min + rng.uniform(0, 0.5);
    c.theta_min = rng.uniform(0, 60);
    c.theta_max = c.theta_min + rng.uniform(0, 30);
    c.phi_min = rng.uniform(-180, 150);
    c.phi_max = c.phi_min + rng.uniform(0, 30);
    s.camera_range.ranges.push_back(c);
  }
  s.table_texture = rng.below(2) ? random_fractal(rng) : random_jitter(rng);
  s.instruction = "pick the object";
  return s;
}

}  // namespace dvkit::testing
