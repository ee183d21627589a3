#include "juliaflow/grid.hpp"

#include <algorithm>
#include <cmath>

#include "juliaflow/error.hpp"

namespace juliaflow {

Box Box::squared(double margin) const {
  const double side = std::max(width(), height()) * (1.0 + 2.0 * margin);
  const Complex c = center();
  return {c.real() - 0.5 * side, c.real() + 0.5 * side, c.imag() - 0.5 * side, c.imag() + 0.5 * side};
}

std::optional<int> GridField::nearest(Complex z) const {
  const double h = cell();
  const int i = static_cast<int>(std::floor((z.real() - bounds.x0) / h));
  const int j = static_cast<int>(std::floor((z.imag() - bounds.y0) / h));
  if (i < 0 || j < 0 || i >= resolution || j >= resolution) return std::nullopt;
  return index(i, j);
}

GridField evaluate_grid(const Polynomial& p, const Box& bounds, int resolution, double floor) {
  if (resolution < 2) throw InvalidArgument("grid resolution must be at least 2");
  GridField grid;
  grid.bounds = bounds;
  grid.resolution = resolution;
  grid.g_values.resize(static_cast<std::size_t>(resolution) * resolution);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const Complex z = grid.node(i, j);
      const double g = floor > 0.0 ? green_value_floor(p, z, floor) : green_value(p, z, 1e-9);
      grid.g_values[static_cast<std::size_t>(grid.index(i, j))] = static_cast<float>(g);
    }
  }
  return grid;
}

std::optional<double> radius_to_potential(const Polynomial& p, Complex center, Complex dir, double target,
                                          double max_radius) {
  // March outward from the center until g exceeds target, then bisect.
  double lo = 0.0;
  if (green_value(p, center, 1e-10) > target) return 0.0;
  const int steps = 256;
  double hi = -1.0;
  for (int k = 1; k <= steps; ++k) {
    const double r = max_radius * k / steps;
    if (green_value(p, center + r * dir, 1e-10) > target) {
      hi = r;
      break;
    }
    lo = r;
  }
  if (hi < 0.0) return std::nullopt;
  for (int it = 0; it < 60; ++it) {
    const double m = 0.5 * (lo + hi);
    (green_value(p, center + m * dir, 1e-10) > target ? hi : lo) = m;
  }
  return hi;
}

Box default_bounds(const Polynomial& p, const LevelScheme& scheme) {
  // {g <= lambda_0} lies inside the disk where the outermost crossing occurs.
  const Complex c = p.centroid();
  const double target = scheme.value(0);
  const double search = 4.0 * p.escape_radius() + std::abs(c);
  double reach = 0.0;
  const int directions = 128;
  for (int k = 0; k < directions; ++k) {
    const Complex dir = std::polar(1.0, 6.283185307179586 * k / directions);
    // Scan from outside inward: first radius (from outside) where g <= target.
    double lo = 0.0;
    double hi = search;
    for (int s = 1024; s >= 0; --s) {
      const double r = search * s / 1024.0;
      if (green_value(p, c + r * dir, 1e-10) <= target) {
        lo = r;
        hi = std::min(search, r + search / 1024.0);
        break;
      }
    }
    for (int it = 0; it < 50; ++it) {
      const double m = 0.5 * (lo + hi);
      (green_value(p, c + m * dir, 1e-10) <= target ? lo : hi) = m;
    }
    reach = std::max(reach, hi);
  }
  const double half = reach * 1.15;
  return {c.real() - half, c.real() + half, c.imag() - half, c.imag() + half};
}

}  // namespace juliaflow
