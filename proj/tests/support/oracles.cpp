#include "oracles.hpp"

#include <cmath>

#include "juliaflow/tree_walk.hpp"

namespace oracle {

using juliaflow::Rational;
using juliaflow::TreeWithDynamics;
using juliaflow::Vertex;
using juliaflow::VertexId;

long double escape_rate(const std::vector<std::complex<long double>>& coeffs, std::complex<long double> z) {
  const int d = static_cast<int>(coeffs.size()) - 1;
  const long double lead_term = std::log(std::abs(coeffs.back())) / (d - 1);
  long double scale = 1.0L;
  for (int n = 0; n < 2000; ++n) {
    if (std::abs(z) > 1e150L) return scale * (std::log(std::abs(z)) + lead_term);
    std::complex<long double> w = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) w = w * z + *it;
    z = w;
    scale /= d;
  }
  return 0.0L;
}

namespace {

// Ordered composition of n into `parts` positive integers.
std::vector<int> random_composition(std::mt19937_64& rng, int n, int min_parts) {
  std::vector<int> parts;
  for (;;) {
    parts.assign(1, 1);
    for (int k = 1; k < n; ++k) {
      if (std::uniform_int_distribution<int>(0, 1)(rng)) {
        parts.push_back(1);
      } else {
        ++parts.back();
      }
    }
    if (static_cast<int>(parts.size()) >= min_parts) return parts;
  }
}

}  // namespace

TreeWithDynamics random_admissible_tree(std::mt19937_64& rng, int max_level) {
  const int d = std::uniform_int_distribution<int>(2, 4)(rng);
  const int H = std::uniform_int_distribution<int>(1, 2)(rng);
  TreeWithDynamics t = juliaflow::make_extended_root(d, H, max_level);
  for (int l = 0; l < max_level; ++l) {
    std::vector<Vertex>& next = t.levels[l + 1];
    const std::size_t count = t.levels[l].size();
    for (std::size_t i = 0; i < count; ++i) {
      const Vertex a = t.levels[l][i];
      const Vertex& fa = t.at(*a.image);
      // Children of a covering the children of F(a), degrees summing to deg a over each.
      std::vector<Vertex> made;
      for (const VertexId& b : fa.children) {
        const int min_parts = (l == 0 && fa.children.size() == 1) ? 2 : 1;
        for (int deg : random_composition(rng, a.degree, min_parts)) {
          Vertex c;
          c.id = {l + 1, static_cast<int>(next.size() + made.size())};
          c.parent = a.id;
          c.degree = deg;
          c.image = b;
          made.push_back(c);
        }
      }
      for (Vertex& c : made) {
        t.levels[l][i].children.push_back(c.id);
        next.push_back(std::move(c));
      }
    }
  }
  return t;
}

std::map<VertexId, Rational> enumerate_loop_erased(const TreeWithDynamics& t, const juliaflow::MeasureAssignment& m,
                                                   int depth) {
  std::map<VertexId, Rational> through;
  std::vector<std::pair<VertexId, Rational>> frontier{{t.root(), Rational(1)}};
  through[t.root()] = 1;
  for (int l = 0; l < depth; ++l) {
    std::vector<std::pair<VertexId, Rational>> grown;
    for (const auto& [v, p] : frontier) {
      for (const auto& [c, q] : juliaflow::step_distribution(t, m, v, juliaflow::WalkMode::LoopErased)) {
        grown.emplace_back(c, p * q);
        through[c] += p * q;
      }
    }
    frontier = std::move(grown);
  }
  return through;
}

}  // namespace oracle
