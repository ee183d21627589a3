#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "juliaflow/grid.hpp"
#include "juliaflow/level_scheme.hpp"
#include "juliaflow/polynomial.hpp"
#include "juliaflow/tree.hpp"

namespace juliaflow {

struct BuildOptions {
  int max_level = 4;
  int grid_resolution = 1024;      // root chart
  int local_resolution = 256;      // charts of degree-1 vertices
  int critical_resolution = 1024;  // charts of critical vertices
  // Levels up to this one are labeled from grids; deeper levels are pulled back combinatorially.
  int geometric_depth = 6;
  int max_refinements = 3;
  long long max_nodes = 4096LL * 4096LL;
  int min_cells = 9;
};

// Child-slot label per node of a vertex chart; -1 outside the vertex's hole.
struct LocalChart {
  Box bounds;
  int resolution = 0;
  std::vector<std::int16_t> label;

  std::optional<int> label_at(Complex z) const;
};

struct PlaneTree {
  Polynomial poly;
  LevelScheme scheme;
  std::vector<CriticalPoint> crits;
  TreeWithDynamics tree;
  Box bounds;
  int geometric_depth = 0;
  // Charts for the root and for critical vertices built geometrically.
  std::map<VertexId, LocalChart> charts;
  // Indices into crits lying in the filled region of each vertex.
  std::map<VertexId, std::vector<int>> crits_inside;
  int max_chart_resolution = 0;
};

PlaneTree build_plane_tree(const Polynomial& p, const BuildOptions& options);
TreeWithDynamics build_tree(const Polynomial& p, const BuildOptions& options);

// Point location by dynamics, disambiguated through stored charts.
class PlaneLocator {
 public:
  explicit PlaneLocator(const PlaneTree& plane) : plane_(plane) {}

  // Child of a whose filled region contains z; z must lie strictly inside the hole of a.
  std::optional<VertexId> child_containing(const VertexId& a, Complex z) const;
  // Nest x_0..x_level containing z, or nullopt where location fails.
  std::optional<std::vector<VertexId>> locate(Complex z, int level) const;
  // Same, reusing the known potential of z.
  std::optional<std::vector<VertexId>> locate(Complex z, int level, double g) const;

 private:
  const PlaneTree& plane_;
};

}  // namespace juliaflow
