#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "juliaflow/plane_sampling.hpp"
#include "juliaflow/rng.hpp"

namespace juliaflow {

namespace {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

Rgb vertex_color(const VertexId& v) {
  const std::uint64_t h = splitmix64((static_cast<std::uint64_t>(v.level) << 32) ^ static_cast<std::uint32_t>(v.index));
  const double shade = 0.55 + 0.45 * std::exp(-0.15 * v.level);
  auto channel = [&](int shift) {
    return static_cast<std::uint8_t>(std::clamp((96 + ((h >> shift) & 0x9f)) * shade, 0.0, 255.0));
  };
  return {channel(0), channel(8), channel(16)};
}

}  // namespace

std::string render_ppm(const PlaneTree& plane, const RenderOptions& options) {
  const int n = std::max(16, options.width);
  const int top = std::min(options.max_level, plane.tree.max_level);
  const Box box = plane.bounds;
  const double h = box.width() / n;
  const PlaneLocator locator(plane);
  const LevelScheme& scheme = plane.scheme;

  // Per pixel: -2 outside lambda_0, -1 unresolved or deeper than `top`, else a packed vertex key.
  std::vector<std::int64_t> key(static_cast<std::size_t>(n) * n, -2);
  std::vector<Rgb> pixels(key.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Complex z{box.x0 + (i + 0.5) * h, box.y1 - (j + 0.5) * h};
      const std::size_t idx = static_cast<std::size_t>(j) * n + i;
      const double g = green_value_floor(plane.poly, z, scheme.value(top + 1));
      if (g > scheme.value(0)) {
        const double t = std::clamp(std::log(g / scheme.value(0)) / 4.0, 0.0, 1.0);
        pixels[idx] = {static_cast<std::uint8_t>(20 + 30 * t), static_cast<std::uint8_t>(24 + 40 * t),
                       static_cast<std::uint8_t>(48 + 80 * t)};
        continue;
      }
      key[idx] = -1;
      pixels[idx] = {250, 250, 250};
      if (g <= 0.0) continue;
      const int l = std::min(scheme.band_of(g), top);
      if (auto nest = locator.locate(z, l, g)) {
        const VertexId v = nest->back();
        key[idx] = (static_cast<std::int64_t>(v.level) << 32) | static_cast<std::uint32_t>(v.index);
        pixels[idx] = vertex_color(v);
      }
    }
  }
  if (options.outlines) {
    std::vector<Rgb> out = pixels;
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        const std::size_t idx = static_cast<std::size_t>(j) * n + i;
        if (key[idx] != key[idx + 1] || key[idx] != key[idx + n]) out[idx] = {0, 0, 0};
      }
    }
    pixels = std::move(out);
  }
  std::string ppm = "P6\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
  ppm.reserve(ppm.size() + pixels.size() * 3);
  for (const Rgb& c : pixels) {
    ppm.push_back(static_cast<char>(c.r));
    ppm.push_back(static_cast<char>(c.g));
    ppm.push_back(static_cast<char>(c.b));
  }
  return ppm;
}

}  // namespace juliaflow
