#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "juliaflow/grid.hpp"
#include "juliaflow/polynomial.hpp"

namespace juliaflow {

struct VertexId {
  int level = 0;
  int index = 0;
  auto operator<=>(const VertexId&) const = default;
};

std::string to_string(const VertexId& id);

struct PlaneRef {
  Complex sample;
  Box box;
};

struct Vertex {
  VertexId id;
  std::optional<VertexId> parent;
  std::vector<VertexId> children;
  int degree = 1;
  std::optional<VertexId> image;  // absent only on the top H extended-root levels
  std::optional<PlaneRef> plane;
};

// Levels min_level..0 form the extended root chain; level 0 holds the root a_0.
struct TreeWithDynamics {
  int d = 2;
  int H = 1;
  int max_level = 0;
  int min_level = 0;
  std::map<int, std::vector<Vertex>> levels;

  VertexId root() const { return {0, 0}; }
  bool contains(const VertexId& id) const;
  const Vertex& at(const VertexId& id) const;
  Vertex& at(const VertexId& id);
  const std::vector<Vertex>& level(int l) const;
  std::size_t vertex_count() const;

  // F^n(v); throws AxiomViolation if an iterate is missing.
  VertexId iterate(VertexId v, int n = 1) const;
  // Ancestor of v at the given level (<= v.level).
  VertexId ancestor(VertexId v, int level) const;
};

// Extended root chain a_min..a_0, with the root given no children yet.
TreeWithDynamics make_extended_root(int d, int H, int max_level);
int extended_root_depth(int H, int max_level);

struct AxiomCheck {
  std::string name;
  bool passed = true;
  std::vector<VertexId> offenders;
};

struct ValidationReport {
  std::vector<AxiomCheck> checks;
  bool all_passed() const;
  const AxiomCheck* find(const std::string& name) const;
  std::string to_string() const;
};

ValidationReport verify_axioms(const TreeWithDynamics& t);

struct EndPrefix {
  std::vector<VertexId> path;  // x_0 .. x_L
  std::optional<int> declared_degree;
};

// Path from the root to v.
EndPrefix prefix_to(const TreeWithDynamics& t, VertexId v);

double end_distance(const EndPrefix& x, const EndPrefix& y, bool declared_equal = false);

enum class EndClass { Singleton, Island, Undecided };
std::string to_string(EndClass c);

struct ClassifyOptions {
  int period_bound = 8;
  int preimage_bound = 8;
};

// True if y (level >= 1) lies on an F-periodic end of degree > 1 detected on its own prefix.
bool is_critical_periodic(const TreeWithDynamics& t, VertexId y, int period_bound);

EndClass classify_end(const TreeWithDynamics& t, const EndPrefix& x, const ClassifyOptions& options = {});

// Vertices at `level` on F-periodic ends whose degrees exceed 1.
std::vector<VertexId> critical_periodic_vertices(const TreeWithDynamics& t, int level, int period_bound);

// F-fixed ends (F(x_l) = x_{l-H}) truncated at `level`, as prefixes.
std::vector<EndPrefix> fixed_ends(const TreeWithDynamics& t, int level);

}  // namespace juliaflow
