#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>
#include <sstream>

#include "juliaflow/error.hpp"
#include "juliaflow/harmonic_measure.hpp"
#include "juliaflow/plane_tree.hpp"
#include "support/oracles.hpp"

using namespace juliaflow;

namespace {

struct Built {
  Polynomial p;
  TreeWithDynamics tree;
  MeasureAssignment omega;
  Built(const char* coeffs, int depth)
      : p(Polynomial::parse(coeffs)), tree(build_tree(p, BuildOptions{.max_level = depth})),
        omega(compute_omega(tree)) {}
};

const Built& quad() {
  static const Built b("-6+0i,0+0i,1+0i", 5);
  return b;
}

const Built& cubic() {
  static const Built b("0+0i,0+0i,-3+0i,1+0i", 5);
  return b;
}

VertexId critical_child(const TreeWithDynamics& t, const VertexId& a) {
  for (const VertexId& c : t.at(a).children) {
    if (t.at(c).degree > 1) return c;
  }
  return t.at(a).children.front();
}

// Omega by direct recursion over the image map, memoized.
Rational recursive_omega(const TreeWithDynamics& t, const VertexId& a, std::map<VertexId, Rational>& memo) {
  if (a.level <= 0) return Rational(1);
  auto it = memo.find(a);
  if (it != memo.end()) return it->second;
  const Rational value = Rational(t.at(a).degree, t.d) * recursive_omega(t, *t.at(a).image, memo);
  memo.emplace(a, value);
  return value;
}

}  // namespace

TEST_CASE("root and extended root have mass one") {
  for (const Built* b : {&quad(), &cubic()}) {
    for (int l = b->tree.min_level; l <= 0; ++l) CHECK(b->omega.at({l, 0}) == 1);
  }
}

TEST_CASE("quadratic masses are dyadic") {
  const Built& b = quad();
  for (int l = 1; l <= b.tree.max_level; ++l) {
    for (const Vertex& v : b.tree.level(l)) CHECK(b.omega.at(v.id) == Rational(1, 1 << l));
  }
}

TEST_CASE("cubic level-one masses") {
  const Built& b = cubic();
  const VertexId crit = critical_child(b.tree, b.tree.root());
  for (const Vertex& v : b.tree.level(1)) {
    CHECK(b.omega.at(v.id) == (v.id == crit ? Rational(2, 3) : Rational(1, 3)));
  }
}

TEST_CASE("product formula matches the recursion") {
  for (const Built* b : {&quad(), &cubic()}) {
    std::map<VertexId, Rational> memo;
    for (int l = 1; l <= b->tree.max_level; ++l) {
      for (const Vertex& v : b->tree.level(l)) {
        CHECK(omega_product(b->tree, v.id) == b->omega.at(v.id));
        CHECK(recursive_omega(b->tree, v.id, memo) == b->omega.at(v.id));
        if (l == 1) CHECK(b->omega.at(v.id) == Rational(v.degree, b->tree.d));
      }
    }
  }
  const Built& q = quad();
  const VertexId v2 = q.tree.level(2)[0].id;
  CHECK(omega_product(q.tree, v2) == Rational(1, 4));
  CHECK(omega_product_uncorrected(q.tree, v2) == Rational(1, 2));
  const Built& c = cubic();
  CHECK(omega_product(c.tree, critical_child(c.tree, c.tree.root())) == Rational(2, 3));
}

TEST_CASE("denominators divide powers of d") {
  const Built& b = cubic();
  for (int l = 1; l <= b.tree.max_level; ++l) {
    const BigInt dl = pow(BigInt(3), l);
    for (const Vertex& v : b.tree.level(l)) CHECK(dl % denominator(b.omega.at(v.id)) == 0);
  }
}

TEST_CASE("flow and invariance are exact") {
  for (const Built* b : {&quad(), &cubic()}) {
    const ValidationReport flow = verify_flow(b->tree, b->omega);
    CHECK_MESSAGE(flow.all_passed(), flow.to_string());
    const ValidationReport inv = verify_f_invariance(b->tree, b->omega);
    CHECK_MESSAGE(inv.all_passed(), inv.to_string());
    for (int l = 0; l <= b->tree.max_level; ++l) {
      Rational sum = 0;
      for (const Vertex& v : b->tree.level(l)) sum += b->omega.at(v.id);
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("damaged measure fails the flow check") {
  const Built& b = cubic();
  MeasureAssignment m = b.omega;
  m.omega[2][0] += Rational(1, 9);
  CHECK_FALSE(verify_flow(b.tree, m).all_passed());
  CHECK_FALSE(verify_f_invariance(b.tree, m).all_passed());
}

TEST_CASE("random trees carry exact flows") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 100; ++k) {
    const TreeWithDynamics t = oracle::random_admissible_tree(rng, 3);
    const MeasureAssignment m = compute_omega(t);
    CHECK(verify_flow(t, m).all_passed());
    CHECK(verify_f_invariance(t, m).all_passed());
    std::map<VertexId, Rational> memo;
    for (int l = 1; l <= t.max_level; ++l) {
      for (const Vertex& v : t.level(l)) {
        CHECK(m.at(v.id) == recursive_omega(t, v.id, memo));
        CHECK(omega_product(t, v.id) == m.at(v.id));
      }
    }
  }
}

TEST_CASE("decay bound for the quadratic") {
  const Built& b = quad();
  const DecayReport r = decay_bound(b.tree, b.omega, critical_points(b.p));
  CHECK(r.bound.D == 1);
  CHECK(r.bound.Q == 1);
  CHECK(r.bound.c0 == 2);
  CHECK(r.all_ok);
  CHECK(r.chained_ok);
  CHECK(r.all_attained);
}

TEST_CASE("decay bound for the cubic") {
  const Built& b = cubic();
  const DecayReport r = decay_bound(b.tree, b.omega, critical_points(b.p));
  CHECK(r.bound.D == 2);
  CHECK(r.bound.c0 == Rational(3, 2));
  CHECK(r.all_ok);
  CHECK(r.chained_ok);
  // The critical nest attains the rate (2/3)^l.
  VertexId x = b.tree.root();
  while (x.level < b.tree.max_level) {
    x = critical_child(b.tree, x);
    CHECK(b.omega.at(x) == power(Rational(2, 3), x.level));
  }
  CHECK_THROWS_AS(decay_bound(b.tree, b.omega, 3, 1, 1), InvalidArgument);
}

TEST_CASE("cone measures") {
  CHECK(cone_measure(quad().omega, Cone{quad().tree.root()}) == 1);
  CHECK(cone_measure(quad().omega, Cone{quad().tree.level(3)[5].id}) == Rational(1, 8));
  const Built& c = cubic();
  CHECK(cone_measure(c.omega, Cone{critical_child(c.tree, c.tree.root())}) == Rational(2, 3));
}

TEST_CASE("subset measure limits") {
  const Built& c = cubic();
  const std::vector<int> levels{1, 2, 3, 4, 5};
  const auto all = subset_measure_limit(c.tree, c.omega, [](const VertexId&) { return true; }, levels);
  for (const Rational& r : all) CHECK(r == 1);

  std::set<VertexId> nest;
  for (VertexId x = c.tree.root(); x.level < c.tree.max_level;) {
    x = critical_child(c.tree, x);
    nest.insert(x);
  }
  const auto single = subset_measure_limit(c.tree, c.omega, [&](const VertexId& v) { return nest.count(v) > 0; }, levels);
  for (std::size_t k = 1; k < single.size(); ++k) CHECK(single[k] < single[k - 1]);
  CHECK(single.back() == power(Rational(2, 3), 5));
}

TEST_CASE("per-end decay") {
  const Built& c = cubic();
  for (const Vertex& v : c.tree.level(c.tree.max_level)) {
    const EndDecay e = end_decay(c.tree, c.omega, prefix_to(c.tree, v.id));
    CHECK(e.strictly_decreasing);
    for (std::size_t l = 0; l < e.omega.size(); ++l) {
      CHECK(e.omega[l] <= e.c * power(Rational(e.degree, 3), static_cast<int>(l)));
    }
  }
}

TEST_CASE("measure csv") {
  const Built& b = quad();
  const DecayReport r = decay_bound(b.tree, b.omega, critical_points(b.p));
  const std::string csv = measure_csv(b.tree, b.omega, r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "level,index,deg,omega_num,omega_den,bound_rhs_num,bound_rhs_den,bound_ok");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == b.tree.vertex_count());
  CHECK(csv.find("\n3,2,1,1,8,1,4,1\n") != std::string::npos);
}
