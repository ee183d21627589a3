#include "juliaflow/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "juliaflow/error.hpp"

namespace juliaflow {

std::vector<Band> classify_bands(const GridField& grid, const LevelScheme& scheme, int level) {
  const double above = scheme.value(level);
  const double own = scheme.value(level + 1);
  const double next = scheme.value(level + 2);
  std::vector<Band> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double g = grid.g_values[k];
    out[k] = g >= above ? Band::Above : g > own ? Band::Own : g > next ? Band::Next : Band::Deep;
  }
  return out;
}

std::vector<std::vector<int>> connected_components(const std::vector<std::uint8_t>& mask, int resolution) {
  std::vector<std::vector<int>> out;
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<int> stack;
  for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
    if (!mask[start] || seen[start]) continue;
    std::vector<int> comp;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      const int i = v % resolution;
      const int j = v / resolution;
      const int nbr[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& n : nbr) {
        if (n[0] < 0 || n[1] < 0 || n[0] >= resolution || n[1] >= resolution) continue;
        const int w = n[1] * resolution + n[0];
        if (mask[w] && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

namespace {

// Maximum of g along the open segment (a, b), golden-section search.
double segment_max(const Polynomial& p, Complex a, Complex b) {
  constexpr double phi = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = green_value(p, a + x1 * (b - a), 1e-12), f2 = green_value(p, a + x2 * (b - a), 1e-12);
  for (int it = 0; it < 14; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = green_value(p, a + x2 * (b - a), 1e-12);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = green_value(p, a + x1 * (b - a), 1e-12);
    }
  }
  return std::max(f1, f2);
}

}  // namespace

std::vector<std::vector<int>> band_components(const Polynomial& p, const GridField& grid,
                                              const std::vector<std::uint8_t>& mask, double ceiling) {
  const int res = grid.resolution;
  const double near = 0.9 * ceiling;
  auto passable = [&](int u, int v) {
    const double gu = grid.g_values[static_cast<std::size_t>(u)];
    const double gv = grid.g_values[static_cast<std::size_t>(v)];
    if (std::max(gu, gv) < near) return true;
    return segment_max(p, grid.node(u), grid.node(v)) < ceiling;
  };
  std::vector<std::vector<int>> out;
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<int> stack;
  for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
    if (!mask[start] || seen[start]) continue;
    std::vector<int> comp;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      const int i = v % res, j = v / res;
      const int nb[4] = {i > 0 ? v - 1 : -1, i + 1 < res ? v + 1 : -1, j > 0 ? v - res : -1,
                         j + 1 < res ? v + res : -1};
      for (int w : nb) {
        if (w < 0 || !mask[static_cast<std::size_t>(w)] || seen[static_cast<std::size_t>(w)]) continue;
        if (!passable(v, w)) continue;
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<std::uint8_t> interior_mask(const std::vector<int>& wall, int resolution) {
  const std::size_t n = static_cast<std::size_t>(resolution) * resolution;
  std::vector<std::uint8_t> state(n, 0);  // 0 unknown, 1 wall, 2 outside
  for (int v : wall) state[v] = 1;
  std::vector<int> stack;
  auto push = [&](int v) {
    if (state[v] == 0) {
      state[v] = 2;
      stack.push_back(v);
    }
  };
  for (int k = 0; k < resolution; ++k) {
    push(k);
    push((resolution - 1) * resolution + k);
    push(k * resolution);
    push(k * resolution + resolution - 1);
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    const int i = v % resolution;
    const int j = v / resolution;
    if (i > 0) push(v - 1);
    if (i + 1 < resolution) push(v + 1);
    if (j > 0) push(v - resolution);
    if (j + 1 < resolution) push(v + resolution);
  }
  std::vector<std::uint8_t> inside(n, 0);
  for (std::size_t k = 0; k < n; ++k) inside[k] = state[k] == 0;
  return inside;
}

AnnulusComponent make_component(const GridField& grid, const LevelScheme& scheme, int level, int id,
                                std::vector<int> cells) {
  AnnulusComponent comp;
  comp.id = id;
  comp.level = level;
  std::sort(cells.begin(), cells.end());
  const int res = grid.resolution;
  auto member = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= res || j >= res) return false;
    return std::binary_search(cells.begin(), cells.end(), j * res + i);
  };

  int imin = res, imax = -1, jmin = res, jmax = -1;
  const double log_mid = std::log(scheme.mid(level));
  const double half_band = 0.5 * std::log(scheme.value(level) / scheme.value(level + 1));
  std::vector<std::pair<double, int>> central;
  for (int v : cells) {
    const int i = v % res;
    const int j = v / res;
    imin = std::min(imin, i);
    imax = std::max(imax, i);
    jmin = std::min(jmin, j);
    jmax = std::max(jmax, j);
    bool full = true;
    for (int dj = -1; dj <= 1 && full; ++dj) {
      for (int di = -1; di <= 1 && full; ++di) full = member(i + di, j + dj);
    }
    if (full) {
      const double g = grid.g_values[static_cast<std::size_t>(v)];
      central.emplace_back(std::abs(std::log(g) - log_mid), v);
    }
  }
  if (central.empty()) {
    for (int v : cells) {
      const double g = grid.g_values[static_cast<std::size_t>(v)];
      central.emplace_back(std::abs(std::log(std::max(g, 1e-300)) - log_mid), v);
    }
  }
  const auto best = std::min_element(central.begin(), central.end());
  comp.sample_points.push_back(grid.node(best->second));
  std::vector<int> spread;
  for (const auto& [dev, v] : central) {
    if (dev <= 0.6 * half_band && v != best->second) spread.push_back(v);
  }
  const std::size_t want = 15;
  for (std::size_t k = 0; k < std::min(want, spread.size()); ++k) {
    comp.sample_points.push_back(grid.node(spread[k * spread.size() / std::min(want, spread.size())]));
  }

  const double h = grid.cell();
  comp.outer_boundary_box = {grid.bounds.x0 + (imin - 0.5) * h, grid.bounds.x0 + (imax + 1.5) * h,
                             grid.bounds.y0 + (jmin - 0.5) * h, grid.bounds.y0 + (jmax + 1.5) * h};
  comp.grid_cells = std::move(cells);
  return comp;
}

std::vector<AnnulusComponent> label_components(const Polynomial& p, const LevelScheme& scheme, int level,
                                               GridField& grid, const LabelOptions& options) {
  std::vector<std::vector<int>> sets;
  for (;;) {
    const std::vector<Band> bands = classify_bands(grid, scheme, level);
    std::vector<std::uint8_t> mask(bands.size());
    for (std::size_t k = 0; k < bands.size(); ++k) mask[k] = bands[k] == Band::Own;
    sets = band_components(p, grid, mask, scheme.value(level));
    std::size_t smallest = sets.empty() ? 0 : sets.front().size();
    for (const auto& s : sets) smallest = std::min(smallest, s.size());
    const long long finer = static_cast<long long>(grid.resolution) * options.refinement_factor;
    const bool undersized = !sets.empty() && smallest < static_cast<std::size_t>(options.min_cells);
    if (!undersized || grid.refinement_depth >= options.max_refinements || finer * finer > options.max_nodes) {
      break;
    }
    const int depth = grid.refinement_depth + 1;
    grid = evaluate_grid(p, grid.bounds, static_cast<int>(finer), 0.5 * scheme.value(level + 2));
    grid.refinement_depth = depth;
  }

  const int res = grid.resolution;
  std::sort(sets.begin(), sets.end(), [res](const std::vector<int>& a, const std::vector<int>& b) {
    auto left = [res](const std::vector<int>& s) {
      int best = s.front();
      for (int v : s) {
        if (v % res < best % res) best = v;
      }
      return std::pair(best % res, best / res);
    };
    return left(a) < left(b);
  });
  std::vector<AnnulusComponent> out;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    out.push_back(make_component(grid, scheme, level, static_cast<int>(k), std::move(sets[k])));
  }
  return out;
}

const AnnulusComponent& nesting_parent(const GridField& grid, const AnnulusComponent& child,
                                       const std::vector<AnnulusComponent>& candidates) {
  const AnnulusComponent* found = nullptr;
  int claims = 0;
  for (const AnnulusComponent& cand : candidates) {
    const std::vector<std::uint8_t> inside = interior_mask(cand.grid_cells, grid.resolution);
    const bool all = std::all_of(child.grid_cells.begin(), child.grid_cells.end(),
                                 [&](int v) { return inside[static_cast<std::size_t>(v)] != 0; });
    if (all) {
      found = &cand;
      ++claims;
    }
  }
  if (claims != 1) {
    throw PartitionInconsistency("component at level " + std::to_string(child.level) + " is claimed by " +
                                 std::to_string(claims) + " parents");
  }
  return *found;
}

int component_image(const Polynomial& p, const AnnulusComponent& source, const PointClassifier& classify,
                    int target_count) {
  std::map<int, int> votes;
  for (const Complex& z : source.sample_points) {
    if (auto t = classify(p(z))) ++votes[*t];
  }
  const int n = static_cast<int>(source.sample_points.size());
  for (const auto& [target, count] : votes) {
    if (target >= 0 && target < target_count && 10 * count >= 9 * n) return target;
  }
  throw ResolutionInsufficient("sample images of a level-" + std::to_string(source.level) +
                               " component straddle several targets");
}

int component_image(const Polynomial& p, const GridField& grid, const AnnulusComponent& source,
                    const std::vector<AnnulusComponent>& targets) {
  std::vector<int> owner(grid.size(), -1);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (int v : targets[t].grid_cells) owner[static_cast<std::size_t>(v)] = static_cast<int>(t);
  }
  PointClassifier classify = [&](Complex w) -> std::optional<int> {
    auto node = grid.nearest(w);
    if (!node || owner[static_cast<std::size_t>(*node)] < 0) return std::nullopt;
    return owner[static_cast<std::size_t>(*node)];
  };
  return component_image(p, source, classify, static_cast<int>(targets.size()));
}

int component_degree(const GridField& grid, const LevelScheme& scheme, const AnnulusComponent& comp,
                     const std::vector<CriticalPoint>& crits) {
  std::vector<std::uint8_t> filled = interior_mask(comp.grid_cells, grid.resolution);
  for (int v : comp.grid_cells) filled[static_cast<std::size_t>(v)] = 1;
  const double ceiling = scheme.value(comp.level) * (1.0 - 1e-9);
  const int res = grid.resolution;
  int degree = 1;
  for (const CriticalPoint& c : crits) {
    if (c.green_value >= ceiling) continue;
    auto node = grid.nearest(c.location);
    if (!node || !filled[static_cast<std::size_t>(*node)]) continue;
    const int i = *node % res;
    const int j = *node / res;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const int a = i + di, b = j + dj;
        if (a < 0 || b < 0 || a >= res || b >= res || !filled[static_cast<std::size_t>(b * res + a)]) {
          throw ResolutionInsufficient("critical point within one cell of a component boundary");
        }
      }
    }
    degree += c.multiplicity;
  }
  return degree;
}

}  // namespace juliaflow
