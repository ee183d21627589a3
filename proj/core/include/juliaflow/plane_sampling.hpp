#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "juliaflow/harmonic_measure.hpp"
#include "juliaflow/plane_tree.hpp"
#include "juliaflow/tree_walk.hpp"

namespace juliaflow {

// ---- external rays ----

struct RayOptions {
  int steps_per_level = 8;
  int max_newton = 20;
  int max_halvings = 6;
  double tolerance = 1e-9;  // relative potential error after correction
  bool keep_points = true;
};

struct RayTrace {
  double angle = 0.0;               // turns, in [0, 1)
  std::vector<Complex> points;      // at decreasing potentials
  std::vector<double> potentials;   // target potential of each point
  std::vector<VertexId> annuli_visited;  // one per level 0..record_level
  bool smooth = true;
  double max_relative_error = 0.0;  // max |g - target| / target over accepted points
};

// Point near the high-potential end of the ray of angle theta, on {g = potential}.
Complex ray_start(const Polynomial& p, double theta, double potential);

// Traces the ray from lambda_start down to lambda_end.  With a locator, the annulus at each
// band midpoint of levels 0..record_level is recorded; lambda_end must then lie below mid(record_level).
RayTrace trace_ray(const Polynomial& p, const LevelScheme* scheme, double theta, double lambda_start,
                   double lambda_end, const RayOptions& options = {}, const PlaneLocator* locator = nullptr,
                   int record_level = -1);

// Convenience: ray of angle theta traced from high potential to mid(level).
RayTrace trace_ray(const PlaneTree& plane, const PlaneLocator& locator, double theta, int level,
                   const RayOptions& options = {});

struct RayEstimate {
  SampleReport report;
  std::uint64_t non_smooth = 0;  // rejected angles, each replaced by a fresh draw
  bool nesting_ok = true;
};

// Throws ResolutionInsufficient when more than 1% of the drawn angles are non-smooth.
RayEstimate estimate_omega_rays(const PlaneTree& plane, const MeasureAssignment& m, std::uint64_t n_angles,
                                std::uint64_t seed, int level);

// ---- Brownian first entry ----

struct BrownianOptions {
  int directions = 16;
  double shrink = 0.5;     // conservative factor on the estimated distance
  int max_steps = 20000;
  bool record_itinerary = true;
};

struct BrownianRun {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  Complex first_entry;
  double entry_g = 0.0;
  std::vector<VertexId> itinerary;              // distinct annuli in order of first visit
  std::vector<VertexId> loop_erased_itinerary;  // x_0..x_level
  int steps = 0;
  bool abandoned = false;
};

// Brownian motion from infinity stopped near {g = entry_potential}; the itinerary is resolved to `level`.
// entry_potential defaults to lambda_{level+1}.
BrownianRun brownian_first_entry(const PlaneTree& plane, const PlaneLocator& locator, std::uint64_t seed,
                                 std::uint64_t index, int level, std::optional<double> entry_potential = {},
                                 const BrownianOptions& options = {});

struct BrownianEstimate {
  SampleReport report;
  std::vector<BrownianRun> runs;
  std::uint64_t nesting_failures = 0;
};

BrownianEstimate estimate_omega_brownian(const PlaneTree& plane, const MeasureAssignment& m, std::uint64_t runs,
                                         std::uint64_t seed, int level, std::optional<double> entry_potential = {},
                                         const BrownianOptions& options = {});

// v (level l) is marked when F^k(v) lies on a critical periodic end (detected at max_level) for some
// 0 <= k <= horizon,
// or when F^k(v) falls into the extended root (l - kH < 0).
VertexPredicate island_marker(const TreeWithDynamics& t, int horizon = 1, int period_bound = 8);

struct IslandReport {
  bool vacuous = false;  // no critical periodic end exists
  int level = 0;
  Rational exact_mass;               // Omega-mass of marked level vertices
  std::size_t marked_count = 0;
  Rational bound;                    // marked_count * c0 * (D/d)^ceil(level/H)
  bool within_bound = true;
  std::uint64_t runs = 0;
  std::uint64_t completed = 0;
  std::uint64_t hits = 0;            // runs whose level vertex is marked
  double empirical = 0.0;
  double band = 0.0;
  bool consistent = true;
  std::vector<int> trend_levels;
  std::vector<Rational> trend_mass;
  bool trend_decreasing = true;
};

IslandReport island_entry_experiment(const PlaneTree& plane, const MeasureAssignment& m, std::uint64_t runs,
                                  int level, std::uint64_t seed, const std::vector<int>& trend_levels = {},
                                  int horizon = 1);

std::string island_summary(const IslandReport& r);

// ---- rendering ----

struct RenderOptions {
  int width = 800;
  int max_level = 4;
  bool outlines = true;
};

// Binary PPM (P6) colored by potential band, with component outlines when requested.
std::string render_ppm(const PlaneTree& plane, const RenderOptions& options);

}  // namespace juliaflow
