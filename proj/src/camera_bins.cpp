#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "dvkit/metadata.hpp"

namespace dvkit::metadata {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// Signed difference a - b folded into (-180, 180].
double wrap_degrees(double d) {
  d = std::fmod(d, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

bool window_contains(const BinTable& t, const CameraBin& b, double theta, double phi) {
  return std::abs(theta - b.polar_center_deg) <= t.polar_width_deg / 2 &&
         std::abs(wrap_degrees(phi - b.azimuth_center_deg)) <= t.azimuth_width_deg / 2;
}

void check_table(const BinTable& t) {
  if (!(t.polar_width_deg > 0) || !(t.azimuth_width_deg > 0))
    throw Error("ConfigError", "bin widths must be positive");
  for (std::size_t i = 0; i < t.bins.size(); ++i) {
    for (std::size_t k = i + 1; k < t.bins.size(); ++k) {
      const auto& a = t.bins[i];
      const auto& b = t.bins[k];
      const bool polar = std::abs(a.polar_center_deg - b.polar_center_deg) < t.polar_width_deg;
      const bool azimuth = std::abs(wrap_degrees(a.azimuth_center_deg - b.azimuth_center_deg)) <
                           t.azimuth_width_deg;
      if (polar && azimuth)
        throw Error("ConfigError", "camera bins '" + a.label + "' and '" + b.label + "' overlap");
    }
  }
}

}  // namespace

SphericalCoords to_spherical(const Vec3& pos, const Vec3& center) {
  const double dx = pos.x - center.x;
  const double dy = pos.y - center.y;
  const double dz = pos.z - center.z;
  const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (r == 0.0) throw DegeneratePose();
  SphericalCoords out;
  out.r = r;
  out.theta_deg = std::acos(std::clamp(dz / r, -1.0, 1.0)) * kRadToDeg;
  out.phi_deg = std::atan2(dy, dx) * kRadToDeg;
  return out;
}

BinTable BinTable::defaults() {
  BinTable t;
  t.bins = {
      {"agent-front", 45.0, 0.0},
      {"agent-left", 45.0, 60.0},
      {"agent-right", 45.0, -60.0},
      {"shoulder-left", 45.0, 120.0},
      {"shoulder-right", 45.0, -120.0},
  };
  return t;
}

BinTable BinTable::from_json_text(std::string_view text) {
  BinTable t;
  try {
    const auto j = nlohmann::json::parse(text);
    t.polar_width_deg = j.value("polar_width_deg", 15.0);
    t.azimuth_width_deg = j.value("azimuth_width_deg", 30.0);
    for (const auto& b : j.at("bins"))
      t.bins.push_back({b.at("label").get<std::string>(), b.at("polar_center_deg").get<double>(),
                        b.at("azimuth_center_deg").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw Error("ConfigError", std::string("bin table: ") + e.what());
  }
  check_table(t);
  return t;
}

BinTable BinTable::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string bin_camera_pose(const Vec3& camera_pos, const Vec3& table_center,
                            const BinTable& table) {
  const SphericalCoords s = to_spherical(camera_pos, table_center);
  for (const auto& b : table.bins)
    if (window_contains(table, b, s.theta_deg, s.phi_deg)) return b.label;
  return std::string(kUnbinned);
}

}  // namespace dvkit::metadata
