#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "juliaflow/error.hpp"
#include "juliaflow/plane_tree.hpp"
#include "juliaflow/tree.hpp"
#include "support/oracles.hpp"

using namespace juliaflow;

namespace {

const TreeWithDynamics& quad_tree() {
  static const TreeWithDynamics t = build_tree(Polynomial::parse("-6+0i,0+0i,1+0i"), BuildOptions{.max_level = 4});
  return t;
}

const TreeWithDynamics& cubic_tree() {
  static const TreeWithDynamics t =
      build_tree(Polynomial::parse("0+0i,0+0i,-3+0i,1+0i"), BuildOptions{.max_level = 5});
  return t;
}

std::vector<std::size_t> level_sizes(const TreeWithDynamics& t) {
  std::vector<std::size_t> out;
  for (int l = 0; l <= t.max_level; ++l) out.push_back(t.level(l).size());
  return out;
}

// Prefix of the end that always follows the child of highest degree.
EndPrefix critical_nest(const TreeWithDynamics& t) {
  EndPrefix x{{t.root()}, std::nullopt};
  while (x.path.back().level < t.max_level) {
    const Vertex& v = t.at(x.path.back());
    VertexId best = v.children.front();
    for (const VertexId& c : v.children) {
      if (t.at(c).degree > t.at(best).degree) best = c;
    }
    x.path.push_back(best);
  }
  return x;
}

}  // namespace

TEST_CASE("quadratic tree is the binary tree") {
  const TreeWithDynamics& t = quad_tree();
  CHECK(t.d == 2);
  CHECK(t.H == 1);
  CHECK(level_sizes(t) == std::vector<std::size_t>{1, 2, 4, 8, 16});
  for (const auto& [l, vs] : t.levels) {
    for (const Vertex& v : vs) CHECK(v.degree == (l <= 0 ? 2 : 1));
  }
  CHECK(t.min_level == -extended_root_depth(t.H, t.max_level) + 0);
  const ValidationReport report = verify_axioms(t);
  CHECK_MESSAGE(report.all_passed(), report.to_string());
}

TEST_CASE("cubic tree has one degree-2 vertex per level") {
  const TreeWithDynamics& t = cubic_tree();
  CHECK(t.d == 3);
  CHECK(t.H == 1);
  CHECK(level_sizes(t) == std::vector<std::size_t>{1, 2, 5, 14, 41, 122});
  for (int l = 1; l <= t.max_level; ++l) {
    int critical = 0;
    for (const Vertex& v : t.level(l)) critical += v.degree == 2;
    CHECK(critical == 1);
  }
  const EndPrefix nest = critical_nest(t);
  for (std::size_t k = 1; k < nest.path.size(); ++k) {
    CHECK(t.at(nest.path[k]).degree == 2);
    CHECK(t.iterate(nest.path[k]) == nest.path[k - 1]);
  }
  const ValidationReport report = verify_axioms(t);
  CHECK_MESSAGE(report.all_passed(), report.to_string());
}

TEST_CASE("root has at least two children and images shift by H") {
  for (const TreeWithDynamics* t : {&quad_tree(), &cubic_tree()}) {
    CHECK(t->at(t->root()).children.size() >= 2);
    for (const auto& [l, vs] : t->levels) {
      for (const Vertex& v : vs) {
        if (v.image) CHECK(v.image->level == l - t->H);
      }
    }
  }
}

TEST_CASE("each vertex receives preimage degree d") {
  const TreeWithDynamics& t = cubic_tree();
  std::map<VertexId, int> received;
  for (const auto& [l, vs] : t.levels) {
    for (const Vertex& v : vs) {
      if (v.image) received[*v.image] += v.degree;
    }
  }
  for (int l = t.min_level; l + t.H <= t.max_level; ++l) {
    for (const Vertex& v : t.level(l)) CHECK(received[v.id] == t.d);
  }
}

TEST_CASE("lowered degree is flagged as a local cover failure") {
  TreeWithDynamics t = cubic_tree();
  const VertexId target = critical_nest(t).path[1];
  t.at(target).degree = 1;
  const ValidationReport report = verify_axioms(t);
  CHECK_FALSE(report.all_passed());
  const AxiomCheck* cover = report.find("local_cover");
  REQUIRE(cover != nullptr);
  CHECK_FALSE(cover->passed);
  CHECK(std::find(cover->offenders.begin(), cover->offenders.end(), target) != cover->offenders.end());
}

TEST_CASE("broken image is flagged") {
  TreeWithDynamics t = quad_tree();
  Vertex& v = t.at({3, 0});
  v.image = VertexId{1, 0};
  const ValidationReport report = verify_axioms(t);
  CHECK_FALSE(report.find("level_shift")->passed);
}

TEST_CASE("extended-root-only tree") {
  const TreeWithDynamics t = make_extended_root(3, 2, 0);
  const ValidationReport report = verify_axioms(t);
  CHECK(report.find("degree_monotone")->passed);
  CHECK(report.find("d_preimages")->passed);
  CHECK(t.at(t.root()).degree == 3);
}

TEST_CASE("extended root depth") {
  CHECK(extended_root_depth(1, 4) == 5);
  CHECK(extended_root_depth(2, 5) == 4);
  const TreeWithDynamics t = make_extended_root(2, 1, 4);
  CHECK(t.min_level == -5);
  CHECK(t.iterate(t.root(), 3) == VertexId{-3, 0});
}

TEST_CASE("end distance") {
  const TreeWithDynamics& t = quad_tree();
  const EndPrefix a = prefix_to(t, {4, 0});
  CHECK(end_distance(a, a, true) == 0.0);
  CHECK_THROWS_AS(end_distance(a, a), InsufficientDepth);

  // Shares only the root.
  const VertexId other_top = t.at(t.root()).children[1] == a.path[1] ? t.at(t.root()).children[0]
                                                                       : t.at(t.root()).children[1];
  EndPrefix b{{t.root(), other_top}, std::nullopt};
  CHECK(end_distance(a, b) == doctest::Approx(1.0));

  // Shares levels 0..3.
  const Vertex& x3 = t.at(a.path[3]);
  EndPrefix c = prefix_to(t, a.path[3]);
  c.path.push_back(x3.children[0] == a.path[4] ? x3.children[1] : x3.children[0]);
  CHECK(end_distance(a, c) == doctest::Approx(std::exp(-3.0)));
  CHECK(end_distance(c, a) == doctest::Approx(std::exp(-3.0)));
}

TEST_CASE("classification of ends") {
  const ClassifyOptions opts{.period_bound = 2, .preimage_bound = 2};
  const TreeWithDynamics& q = quad_tree();
  for (const Vertex& v : q.level(q.max_level)) {
    CHECK(classify_end(q, prefix_to(q, v.id), opts) == EndClass::Singleton);
  }
  const TreeWithDynamics& c = cubic_tree();
  CHECK(classify_end(c, critical_nest(c), opts) == EndClass::Island);
  int singletons = 0;
  for (const Vertex& v : c.level(c.max_level)) {
    singletons += classify_end(c, prefix_to(c, v.id), opts) == EndClass::Singleton;
  }
  CHECK(singletons > 0);
  // Short prefixes cannot be classified.
  CHECK(classify_end(c, prefix_to(c, c.level(2)[0].id)) == EndClass::Undecided);
}

TEST_CASE("fixed ends") {
  const auto qf = fixed_ends(quad_tree(), 4);
  CHECK(qf.size() == 2);
  // The fixed points 0 and (3 - sqrt 21)/2 share the critical nest.
  const auto cf = fixed_ends(cubic_tree(), 5);
  CHECK(cf.size() == 2);
  int critical = 0;
  for (const EndPrefix& e : cf) critical += e.declared_degree.value_or(0) == 2;
  CHECK(critical == 1);
}

TEST_CASE("critical periodic vertices") {
  const TreeWithDynamics& c = cubic_tree();
  CHECK(critical_periodic_vertices(c, 1, 2).empty());
  for (int l = 2; l <= c.max_level; ++l) {
    const auto v = critical_periodic_vertices(c, l, 2);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == critical_nest(c).path[static_cast<std::size_t>(l)]);
  }
  CHECK(critical_periodic_vertices(quad_tree(), 3, 8).empty());
}

TEST_CASE("random admissible trees satisfy the axioms") {
  std::mt19937_64 rng(20261014);
  for (int k = 0; k < 200; ++k) {
    const TreeWithDynamics t = oracle::random_admissible_tree(rng, 3);
    const ValidationReport report = verify_axioms(t);
    REQUIRE_MESSAGE(report.all_passed(), report.to_string());
    CHECK(t.at(t.root()).children.size() >= 2);
  }
}
