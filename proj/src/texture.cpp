#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "dvkit/genkit.hpp"
#include "dvkit/rng.hpp"

namespace dvkit::genkit {

using taskspec::Hsv;
using taskspec::TextureSpec;

namespace {

double lattice(std::int64_t ix, std::int64_t iy, int octave, std::uint64_t seed) {
  std::uint64_t h = SplitMix64::mix(seed ^ SplitMix64::mix(static_cast<std::uint64_t>(octave)));
  h = SplitMix64::mix(h ^ static_cast<std::uint64_t>(ix));
  h = SplitMix64::mix(h ^ (static_cast<std::uint64_t>(iy) * SplitMix64::kGolden));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3 - 2 * t); }

double value_noise(double x, double y, int octave, std::uint64_t seed) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
  const double tx = smooth(x - fx), ty = smooth(y - fy);
  const double a = lattice(ix, iy, octave, seed), b = lattice(ix + 1, iy, octave, seed);
  const double c = lattice(ix, iy + 1, octave, seed), d = lattice(ix + 1, iy + 1, octave, seed);
  const double top = a + (b - a) * tx;
  const double bottom = c + (d - c) * tx;
  return top + (bottom - top) * ty;
}

double map_linear(double n, double lo, double hi) {
  return std::clamp(lo + n * (hi - lo), lo, hi);
}

double map_hue(double n, double lo, double hi) {
  if (lo <= hi) return map_linear(n, lo, hi);
  const double h = lo + n * (1.0 - lo + hi);
  return h >= 1.0 ? std::min(h - 1.0, hi) : h;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw Error("FormatError", "truncated raster");
  return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
         std::uint32_t{b[3]} << 24;
}

std::array<double, 3> hsv_to_rgb(const Hsv& c) {
  const double h = (c.h - std::floor(c.h)) * 6.0;
  const int i = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = c.v * (1 - c.s), q = c.v * (1 - c.s * f), t = c.v * (1 - c.s * (1 - f));
  switch (i) {
    case 0: return {c.v, t, p};
    case 1: return {q, c.v, p};
    case 2: return {p, c.v, t};
    case 3: return {p, q, c.v};
    case 4: return {t, p, c.v};
    default: return {c.v, p, q};
  }
}

}  // namespace

double fractal_noise(double x, double y, std::uint64_t seed) {
  double sum = 0, norm = 0, amp = 1, freq = 1;
  for (int o = 0; o < kNoiseOctaves; ++o) {
    sum += amp * value_noise(x * freq, y * freq, o, seed);
    norm += amp;
    amp *= kNoisePersistence;
    freq *= 2;
  }
  return std::clamp(sum / norm, 0.0, 1.0);
}

TextureRaster fractal_texture(const TextureSpec& spec, std::size_t width, std::size_t height,
                              std::uint64_t seed) {
  if (spec.mode != taskspec::TextureMode::kFractal)
    throw RangeError("texture", "fractal textures need a fractal spec");
  if (width == 0 || height == 0) throw RangeError("size", "width and height must be at least 1");
  TextureRaster r{width, height, {}};
  r.pixels.reserve(width * height);
  std::array<std::uint64_t, 3> seeds;
  for (std::uint64_t c = 0; c < 3; ++c) seeds[c] = SplitMix64::substream(seed, c)();
  for (std::size_t py = 0; py < height; ++py) {
    const double y = (static_cast<double>(py) + 0.5) / static_cast<double>(height) * kNoiseBaseCells;
    for (std::size_t px = 0; px < width; ++px) {
      const double x = (static_cast<double>(px) + 0.5) / static_cast<double>(width) * kNoiseBaseCells;
      r.pixels.push_back({map_hue(fractal_noise(x, y, seeds[0]), spec.h_min, spec.h_max),
                          map_linear(fractal_noise(x, y, seeds[1]), spec.s_min, spec.s_max),
                          map_linear(fractal_noise(x, y, seeds[2]), spec.v_min, spec.v_max)});
    }
  }
  return r;
}

bool raster_within(const TextureSpec& spec, const TextureRaster& raster) {
  return std::all_of(raster.pixels.begin(), raster.pixels.end(), [&](const Hsv& c) {
    return taskspec::hue_in_range(c.h, spec.h_min, spec.h_max) && spec.s_min <= c.s &&
           c.s <= spec.s_max && spec.v_min <= c.v && c.v <= spec.v_max;
  });
}

void write_raster(std::ostream& os, const TextureRaster& r) {
  os.write("DVTX", 4);
  put_u32(os, static_cast<std::uint32_t>(r.width));
  put_u32(os, static_cast<std::uint32_t>(r.height));
  for (const Hsv& c : r.pixels)
    for (double v : {c.h, c.s, c.v}) put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

TextureRaster read_raster(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "DVTX", 4) != 0)
    throw Error("FormatError", "not a raster file");
  TextureRaster r;
  r.width = get_u32(is);
  r.height = get_u32(is);
  r.pixels.resize(r.width * r.height);
  for (Hsv& c : r.pixels) {
    c.h = std::bit_cast<float>(get_u32(is));
    c.s = std::bit_cast<float>(get_u32(is));
    c.v = std::bit_cast<float>(get_u32(is));
  }
  return r;
}

void write_ppm(std::ostream& os, const TextureRaster& r) {
  os << "P6\n" << r.width << ' ' << r.height << "\n255\n";
  for (const Hsv& c : r.pixels) {
    for (double v : hsv_to_rgb(c)) {
      const auto byte = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255));
      os.put(static_cast<char>(byte));
    }
  }
}

}  // namespace dvkit::genkit
