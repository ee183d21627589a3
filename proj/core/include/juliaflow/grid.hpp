#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "juliaflow/level_scheme.hpp"
#include "juliaflow/polynomial.hpp"

namespace juliaflow {

struct Box {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Complex center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(Complex z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
  // Square box with the same center and side max(width, height) * (1 + 2 * margin).
  Box squared(double margin = 0.0) const;
};

// Square sample lattice; node (i, j) sits at the center of cell (i, j).
struct GridField {
  Box bounds;
  int resolution = 0;
  std::vector<float> g_values;
  int refinement_depth = 0;

  double cell() const { return bounds.width() / resolution; }
  int index(int i, int j) const { return j * resolution + i; }
  Complex node(int i, int j) const {
    return {bounds.x0 + (i + 0.5) * cell(), bounds.y0 + (j + 0.5) * cell()};
  }
  Complex node(int idx) const { return node(idx % resolution, idx / resolution); }
  std::optional<int> nearest(Complex z) const;
  std::size_t size() const { return g_values.size(); }
};

inline constexpr int kMinGridResolution = 256;

// Values below floor may be stored as 0.
GridField evaluate_grid(const Polynomial& p, const Box& bounds, int resolution, double floor = 0.0);

// Square box around {g <= lambda_0} with margin.
Box default_bounds(const Polynomial& p, const LevelScheme& scheme);

// Radius from `center` along direction `dir` where g first drops to `target`, searched up to `max_radius`.
std::optional<double> radius_to_potential(const Polynomial& p, Complex center, Complex dir, double target,
                                          double max_radius);

}  // namespace juliaflow
