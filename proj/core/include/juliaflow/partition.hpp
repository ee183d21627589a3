#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "juliaflow/grid.hpp"
#include "juliaflow/level_scheme.hpp"
#include "juliaflow/polynomial.hpp"

namespace juliaflow {

struct AnnulusComponent {
  int id = 0;
  int level = 0;
  std::vector<Complex> sample_points;  // front() is the most central
  std::vector<int> grid_cells;         // sorted node indices, one 4-connected set
  Box outer_boundary_box;
};

// Per-node band code relative to a level l.
enum class Band : std::uint8_t {
  Above = 0,  // g >= lambda_l
  Own = 1,    // lambda_{l+1} < g < lambda_l
  Next = 2,   // lambda_{l+2} < g <= lambda_{l+1}
  Deep = 3,   // g <= lambda_{l+2}
};

std::vector<Band> classify_bands(const GridField& grid, const LevelScheme& scheme, int level);

// 4-connected components of nodes where mask is nonzero; each list is sorted.
std::vector<std::vector<int>> connected_components(const std::vector<std::uint8_t>& mask, int resolution);

// As connected_components, but an edge whose segment reaches g >= ceiling is cut, so
// components touching at a saddle of g stay separate.
std::vector<std::vector<int>> band_components(const Polynomial& p, const GridField& grid,
                                              const std::vector<std::uint8_t>& mask, double ceiling);

// Nodes not reachable from the grid border without crossing `wall`, excluding the wall itself.
std::vector<std::uint8_t> interior_mask(const std::vector<int>& wall, int resolution);

// Builds a component record (sample points, box) from a node set.
AnnulusComponent make_component(const GridField& grid, const LevelScheme& scheme, int level, int id,
                                std::vector<int> cells);

struct LabelOptions {
  int min_cells = 9;
  int max_refinements = 3;
  int refinement_factor = 4;
  long long max_nodes = 4096LL * 4096LL;
};

// One component per 4-connected set of band-l nodes. Undersized components trigger
// re-evaluation of `grid` at a finer resolution.
std::vector<AnnulusComponent> label_components(const Polynomial& p, const LevelScheme& scheme, int level,
                                               GridField& grid, const LabelOptions& options = {});

// Candidate whose filled region contains the child.
const AnnulusComponent& nesting_parent(const GridField& grid, const AnnulusComponent& child,
                                       const std::vector<AnnulusComponent>& candidates);

// Classifier returns the index of the target containing a point, if any.
using PointClassifier = std::function<std::optional<int>(Complex)>;

// Index of the target receiving at least 90% of the sample images.
int component_image(const Polynomial& p, const AnnulusComponent& source, const PointClassifier& classify,
                    int target_count);
int component_image(const Polynomial& p, const GridField& grid, const AnnulusComponent& source,
                    const std::vector<AnnulusComponent>& targets);

int component_degree(const GridField& grid, const LevelScheme& scheme, const AnnulusComponent& comp,
                     const std::vector<CriticalPoint>& crits);

}  // namespace juliaflow
