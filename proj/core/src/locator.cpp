#include "juliaflow/plane_tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace juliaflow {

std::optional<int> LocalChart::label_at(Complex z) const {
  const double h = bounds.width() / resolution;
  const int i = static_cast<int>(std::floor((z.real() - bounds.x0) / h));
  const int j = static_cast<int>(std::floor((z.imag() - bounds.y0) / h));
  if (i < 0 || j < 0 || i >= resolution || j >= resolution) return std::nullopt;
  const int v = label[static_cast<std::size_t>(j) * resolution + i];
  if (v >= 0) return v;
  // Nearest labeled node within two cells.
  std::map<int, int> votes;
  for (int dj = -2; dj <= 2; ++dj) {
    for (int di = -2; di <= 2; ++di) {
      const int a = i + di, b = j + dj;
      if (a < 0 || b < 0 || a >= resolution || b >= resolution) continue;
      const int w = label[static_cast<std::size_t>(b) * resolution + a];
      if (w >= 0) ++votes[w];
    }
  }
  if (votes.size() == 1) return votes.begin()->first;
  return std::nullopt;
}

std::optional<VertexId> PlaneLocator::child_containing(const VertexId& a, Complex z) const {
  const TreeWithDynamics& t = plane_.tree;
  const Vertex& v = t.at(a);
  if (v.children.empty()) return std::nullopt;
  if (v.children.size() == 1) return v.children.front();

  std::vector<VertexId> candidates;
  if (v.image) {
    const Vertex& fa = t.at(*v.image);
    std::optional<VertexId> target;
    if (fa.children.size() == 1) {
      target = fa.children.front();
    } else {
      target = child_containing(*v.image, plane_.poly(z));
    }
    if (target) {
      for (const VertexId& c : v.children) {
        if (t.at(c).image == target) candidates.push_back(c);
      }
      if (candidates.size() == 1) return candidates.front();
    }
  }
  if (candidates.empty()) candidates = v.children;

  auto chart = plane_.charts.find(a);
  if (chart != plane_.charts.end()) {
    if (auto slot = chart->second.label_at(z)) {
      const VertexId c = v.children[static_cast<std::size_t>(*slot)];
      if (std::find(candidates.begin(), candidates.end(), c) != candidates.end()) return c;
    }
    return std::nullopt;
  }

  // A tracked critical point resolves to the child recorded as containing it.
  auto inside = plane_.crits_inside.find(a);
  if (inside != plane_.crits_inside.end()) {
    for (int ci : inside->second) {
      const CriticalPoint& cp = plane_.crits[static_cast<std::size_t>(ci)];
      if (std::abs(cp.location - z) > 1e-9 * std::max(1.0, std::abs(z))) continue;
      for (const VertexId& c : candidates) {
        auto ci_child = plane_.crits_inside.find(c);
        if (ci_child != plane_.crits_inside.end() &&
            std::find(ci_child->second.begin(), ci_child->second.end(), ci) != ci_child->second.end()) {
          return c;
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<std::vector<VertexId>> PlaneLocator::locate(Complex z, int level) const {
  return locate(z, level, green_value(plane_.poly, z));
}

std::optional<std::vector<VertexId>> PlaneLocator::locate(Complex z, int level, double g) const {
  const TreeWithDynamics& t = plane_.tree;
  if (level > t.max_level) return std::nullopt;
  if (g > 0.0 && plane_.scheme.band_of(g) < level) return std::nullopt;
  std::vector<VertexId> path{t.root()};
  for (int l = 1; l <= level; ++l) {
    auto next = child_containing(path.back(), z);
    if (!next) return std::nullopt;
    path.push_back(*next);
  }
  return path;
}

}  // namespace juliaflow
