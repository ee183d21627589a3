#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "juliaflow/error.hpp"
#include "juliaflow/grid.hpp"
#include "juliaflow/level_scheme.hpp"
#include "juliaflow/partition.hpp"

using namespace juliaflow;

namespace {

const Polynomial quad = Polynomial::parse("-6+0i,0+0i,1+0i");
const Polynomial cubic = Polynomial::parse("0+0i,0+0i,-3+0i,1+0i");

struct Fixture {
  Polynomial p;
  LevelScheme scheme;
  GridField grid;
  explicit Fixture(const Polynomial& poly, int max_level, int res = 1024)
      : p(poly), scheme(build_level_scheme(poly, max_level)),
        grid(evaluate_grid(poly, default_bounds(poly, scheme), res)) {}
};

Fixture& quad_fixture() {
  static Fixture f(quad, 4);
  return f;
}

Fixture& cubic_fixture() {
  static Fixture f(cubic, 4);
  return f;
}

int containing(const std::vector<AnnulusComponent>& comps, const GridField& grid, Complex z) {
  // Component whose filled region contains z.
  const int node = *grid.nearest(z);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    std::vector<std::uint8_t> filled = interior_mask(comps[k].grid_cells, grid.resolution);
    for (int v : comps[k].grid_cells) filled[static_cast<std::size_t>(v)] = 1;
    if (filled[static_cast<std::size_t>(node)]) return static_cast<int>(k);
  }
  return -1;
}

}  // namespace

TEST_CASE("level scheme rejects connected Julia sets") {
  CHECK_THROWS_AS(build_level_scheme(Polynomial::parse("0+0i,0+0i,1+0i"), 3), ConnectedJuliaSet);
  CHECK_THROWS_AS(build_level_scheme(Polynomial::parse("-1+0i,0+0i,1+0i"), 3), ConnectedJuliaSet);
}

TEST_CASE("level scheme of the quadratic") {
  const LevelScheme s = build_level_scheme(quad, 6);
  CHECK(s.H == 1);
  CHECK(s.top_level_value == doctest::Approx(green_value(quad, 0.0)).epsilon(1e-12));
  for (int l = -1; l <= 7; ++l) {
    CHECK(s.value(l) == doctest::Approx(green_value(quad, 0.0) * std::pow(2.0, 1 - l)).epsilon(1e-12));
  }
}

TEST_CASE("level scheme of the cubic") {
  const LevelScheme s = build_level_scheme(cubic, 6);
  CHECK(s.H == 1);
  CHECK(s.top_level_value == doctest::Approx(green_value(cubic, 2.0)).epsilon(1e-12));
  for (int l = 0; l <= 7; ++l) CHECK(s.value(l - 1) == doctest::Approx(3.0 * s.value(l)).epsilon(1e-9));
}

TEST_CASE("two independent escaping critical orbits give H = 2") {
  const Polynomial p = Polynomial::parse("0.5+0.2i,-6+1i,0+0i,1+0i");
  const auto crits = critical_points(p);
  REQUIRE(crits.size() == 2);
  REQUIRE(crits[0].escaping);
  REQUIRE(crits[1].escaping);
  const LevelScheme s = build_level_scheme(p, 6);
  CHECK(s.H == 2);
  CHECK(s.top_level_value == doctest::Approx(std::max(crits[0].green_value, crits[1].green_value)));
  for (int l = 1; l <= 7; ++l) {
    CHECK(s.value(l) < s.value(l - 1));
    CHECK(s.value(l - 2) == doctest::Approx(3.0 * s.value(l)).epsilon(1e-9));
  }
}

TEST_CASE("band lookup and midpoints") {
  const LevelScheme s = build_level_scheme(quad, 5);
  for (int l = 0; l <= 5; ++l) {
    CHECK(s.band_of(s.mid(l)) == l);
    CHECK(s.band_of(s.value(l)) == l);
    CHECK(s.band_of(s.value(l + 1) * 1.0000001) == l);
    CHECK(s.mid(l) < s.value(l));
    CHECK(s.mid(l) > s.value(l + 1));
  }
}

TEST_CASE("connected components and interior mask on a ring") {
  const int n = 9;
  std::vector<std::uint8_t> ring(n * n, 0);
  for (int k = 2; k <= 6; ++k) {
    ring[2 * n + k] = ring[6 * n + k] = ring[k * n + 2] = ring[k * n + 6] = 1;
  }
  ring[0] = 1;
  const auto comps = connected_components(ring, n);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].size() == 1);
  CHECK(comps[1].size() == 16);
  const auto inside = interior_mask(comps[1], n);
  int count = 0;
  for (auto v : inside) count += v;
  CHECK(count == 9);
  CHECK(inside[4 * n + 4] == 1);
  CHECK(inside[0] == 0);
}

TEST_CASE("grid covers the domain") {
  Fixture& f = quad_fixture();
  CHECK(f.grid.resolution >= kMinGridResolution);
  CHECK(std::abs(f.grid.bounds.width() - f.grid.bounds.height()) < 1e-12);
  // Border nodes lie outside {g <= lambda_0}.
  const int n = f.grid.resolution;
  double border_min = f.grid.g_values[0];
  for (int k = 0; k < n; ++k) {
    border_min = std::min<double>({border_min, f.grid.g_values[static_cast<std::size_t>(f.grid.index(k, 0))],
                           f.grid.g_values[static_cast<std::size_t>(f.grid.index(0, k))]});
  }
  CHECK(border_min > f.scheme.value(0));
}

TEST_CASE("quadratic components per level") {
  Fixture& f = quad_fixture();
  CHECK(label_components(f.p, f.scheme, 0, f.grid).size() == 1);
  CHECK(label_components(f.p, f.scheme, 1, f.grid).size() == 2);
  CHECK(label_components(f.p, f.scheme, 2, f.grid).size() == 4);
  CHECK(label_components(f.p, f.scheme, 3, f.grid).size() == 8);
}

TEST_CASE("cubic components at level 1") {
  Fixture& f = cubic_fixture();
  CHECK(label_components(f.p, f.scheme, 0, f.grid).size() == 1);
  CHECK(label_components(f.p, f.scheme, 1, f.grid).size() == 2);
}

TEST_CASE("every band node belongs to exactly one component, samples in band") {
  Fixture& f = quad_fixture();
  for (int l = 0; l <= 2; ++l) {
    const auto comps = label_components(f.p, f.scheme, l, f.grid);
    const auto bands = classify_bands(f.grid, f.scheme, l);
    std::vector<int> owner(f.grid.size(), 0);
    for (const auto& c : comps) {
      CHECK(c.level == l);
      CHECK_FALSE(c.sample_points.empty());
      for (int v : c.grid_cells) ++owner[static_cast<std::size_t>(v)];
      for (Complex z : c.sample_points) {
        const double g = green_value(f.p, z);
        CHECK(g < f.scheme.value(l));
        CHECK(g > f.scheme.value(l + 1));
      }
    }
    int mismatches = 0;
    for (std::size_t k = 0; k < owner.size(); ++k) {
      if (owner[k] != (bands[k] == Band::Own ? 1 : 0)) ++mismatches;
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("nesting parents of the quadratic") {
  Fixture& f = quad_fixture();
  const auto l0 = label_components(f.p, f.scheme, 0, f.grid);
  const auto l1 = label_components(f.p, f.scheme, 1, f.grid);
  const auto l2 = label_components(f.p, f.scheme, 2, f.grid);
  for (const auto& c : l1) CHECK(&nesting_parent(f.grid, c, l0) == &l0[0]);
  std::vector<int> children(l1.size(), 0);
  for (const auto& c : l2) {
    const AnnulusComponent& parent = nesting_parent(f.grid, c, l1);
    ++children[static_cast<std::size_t>(&parent - l1.data())];
  }
  CHECK(children == std::vector<int>{2, 2});
  CHECK_THROWS_AS(nesting_parent(f.grid, l2[0], {l2[1]}), PartitionInconsistency);
}

TEST_CASE("component images") {
  Fixture& q = quad_fixture();
  const auto q0 = label_components(q.p, q.scheme, 0, q.grid);
  const auto q1 = label_components(q.p, q.scheme, 1, q.grid);
  for (const auto& c : q1) CHECK(component_image(q.p, q.grid, c, q0) == 0);

  Fixture& c = cubic_fixture();
  const auto c1 = label_components(c.p, c.scheme, 1, c.grid);
  const auto c2 = label_components(c.p, c.scheme, 2, c.grid);
  const int nest1 = containing(c1, c.grid, 0.0);
  const int nest2 = containing(c2, c.grid, 0.0);
  REQUIRE(nest1 >= 0);
  REQUIRE(nest2 >= 0);
  CHECK(component_image(c.p, c.grid, c2[static_cast<std::size_t>(nest2)], c1) == nest1);
  CHECK(&nesting_parent(c.grid, c2[static_cast<std::size_t>(nest2)], c1) == &c1[static_cast<std::size_t>(nest1)]);
}

TEST_CASE("component degrees") {
  Fixture& q = quad_fixture();
  const auto qc = critical_points(q.p);
  const auto q0 = label_components(q.p, q.scheme, 0, q.grid);
  CHECK(component_degree(q.grid, q.scheme, q0[0], qc) == 2);
  for (const auto& comp : label_components(q.p, q.scheme, 2, q.grid)) {
    CHECK(component_degree(q.grid, q.scheme, comp, qc) == 1);
  }

  Fixture& c = cubic_fixture();
  const auto cc = critical_points(c.p);
  const auto c1 = label_components(c.p, c.scheme, 1, c.grid);
  const int nest = containing(c1, c.grid, 0.0);
  int total = 0;
  for (std::size_t k = 0; k < c1.size(); ++k) {
    const int deg = component_degree(c.grid, c.scheme, c1[k], cc);
    CHECK(deg == (static_cast<int>(k) == nest ? 2 : 1));
    total += deg;
  }
  CHECK(total == 3);
}
