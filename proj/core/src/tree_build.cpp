#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "juliaflow/error.hpp"
#include "juliaflow/partition.hpp"
#include "juliaflow/plane_tree.hpp"

namespace juliaflow {

namespace {

struct ChildSpec {
  int degree = 1;
  VertexId image;
  std::vector<int> crits;
  std::optional<PlaneRef> plane;
};

struct Expansion {
  std::vector<ChildSpec> children;
  std::optional<LocalChart> chart;
};

class Builder {
 public:
  Builder(PlaneTree& plane, const BuildOptions& options)
      : plane_(plane), t_(plane.tree), options_(options), locator_(plane) {}

  void run() {
    for (int l = 0; l < options_.max_level; ++l) {
      const bool geometric = l + 1 <= plane_.geometric_depth;
      std::vector<Expansion> expansions;
      for (const Vertex& a : t_.level(l)) {
        expansions.push_back(geometric && a.plane ? expand_geometric(a) : expand_combinatorial(a));
      }
      std::vector<Vertex>& next = t_.levels[l + 1];
      for (std::size_t i = 0; i < expansions.size(); ++i) {
        const VertexId parent{l, static_cast<int>(i)};
        for (ChildSpec& spec : expansions[i].children) {
          Vertex c;
          c.id = {l + 1, static_cast<int>(next.size())};
          c.parent = parent;
          c.degree = spec.degree;
          c.image = spec.image;
          c.plane = spec.plane;
          if (!spec.crits.empty()) plane_.crits_inside[c.id] = spec.crits;
          t_.at(parent).children.push_back(c.id);
          next.push_back(std::move(c));
        }
        if (expansions[i].chart) plane_.charts[parent] = std::move(*expansions[i].chart);
      }
    }
  }

 private:
  std::optional<VertexId> image_target(const Vertex& a, Complex w) const {
    const Vertex& fa = t_.at(*a.image);
    if (fa.children.size() == 1) return fa.children.front();
    return locator_.child_containing(fa.id, w);
  }

  const std::vector<int>& crits_of(const VertexId& id) const {
    static const std::vector<int> none;
    auto it = plane_.crits_inside.find(id);
    return it == plane_.crits_inside.end() ? none : it->second;
  }

  bool local_cover_holds(const Vertex& a, const std::vector<ChildSpec>& children) const {
    const Vertex& fa = t_.at(*a.image);
    std::map<VertexId, int> over;
    for (const ChildSpec& c : children) over[c.image] += c.degree;
    if (over.size() != fa.children.size()) return false;
    for (const VertexId& b : fa.children) {
      auto it = over.find(b);
      if (it == over.end() || it->second != a.degree) return false;
    }
    return true;
  }

  Expansion expand_geometric(const Vertex& a) {
    int res = a.id.level == 0 ? options_.grid_resolution
                              : (a.degree > 1 ? options_.critical_resolution : options_.local_resolution);
    std::string why;
    for (int attempt = 0; attempt <= options_.max_refinements; ++attempt) {
      if (auto e = try_expand(a, a.plane->box, res, why)) {
        plane_.max_chart_resolution = std::max(plane_.max_chart_resolution, res);
        return std::move(*e);
      }
      const long long finer = 2LL * res;
      if (finer * finer > options_.max_nodes) break;
      res = static_cast<int>(finer);
    }
    throw ResolutionInsufficient("vertex " + to_string(a.id) + " unresolved at " + std::to_string(res) +
                                 "^2 nodes: " + why);
  }

  std::optional<Expansion> try_expand(const Vertex& a, const Box& box, int res, std::string& why) {
    const int l = a.id.level;
    const LevelScheme& s = plane_.scheme;
    const GridField grid = evaluate_grid(plane_.poly, box, res, 0.5 * s.value(l + 2));
    const std::vector<Band> bands = classify_bands(grid, s, l);
    const std::size_t n = bands.size();

    // Own annulus: band-l nodes connected to the sample point.
    auto start = grid.nearest(a.plane->sample);
    if (!start) {
      why = "sample point outside chart";
      return std::nullopt;
    }
    int seed = -1;
    for (int r = 0; r <= 3 && seed < 0; ++r) {
      const int i0 = *start % res, j0 = *start / res;
      for (int dj = -r; dj <= r && seed < 0; ++dj) {
        for (int di = -r; di <= r && seed < 0; ++di) {
          const int i = i0 + di, j = j0 + dj;
          if (i < 0 || j < 0 || i >= res || j >= res) continue;
          if (bands[static_cast<std::size_t>(j * res + i)] == Band::Own) seed = j * res + i;
        }
      }
    }
    if (seed < 0) {
      why = "no band node near the sample point";
      return std::nullopt;
    }
    std::vector<std::uint8_t> own(n, 0);
    for (std::size_t k = 0; k < n; ++k) own[k] = bands[k] == Band::Own;
    std::vector<int> wall;
    for (std::vector<int>& c : band_components(plane_.poly, grid, own, s.value(l))) {
      if (std::binary_search(c.begin(), c.end(), seed)) {
        wall = std::move(c);
        break;
      }
    }
    const std::vector<std::uint8_t> inside = interior_mask(wall, res);

    std::vector<std::uint8_t> next_mask(n, 0), deep_mask(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      if (!inside[k]) continue;
      if (bands[k] == Band::Above || bands[k] == Band::Own) {
        why = "hole contains nodes above the child band";
        return std::nullopt;
      }
      next_mask[k] = bands[k] == Band::Next;
      deep_mask[k] = bands[k] == Band::Deep;
    }
    std::vector<std::vector<int>> comps = band_components(plane_.poly, grid, next_mask, s.value(l + 1));
    if (comps.empty()) {
      why = "no child components";
      return std::nullopt;
    }
    for (const auto& c : comps) {
      if (static_cast<int>(c.size()) < options_.min_cells) {
        why = "undersized child component";
        return std::nullopt;
      }
    }

    // Order children by leftmost node.
    auto leftmost = [res](const std::vector<int>& cells) {
      std::pair<int, int> best{res, res};
      for (int v : cells) best = std::min(best, std::pair(v % res, v / res));
      return best;
    };
    std::sort(comps.begin(), comps.end(),
              [&](const auto& x, const auto& y) { return leftmost(x) < leftmost(y); });

    std::vector<std::int16_t> label(n, -1);
    if (comps.size() > 32000) {
      why = "too many children";
      return std::nullopt;
    }
    for (std::size_t k = 0; k < comps.size(); ++k) {
      for (int v : comps[k]) label[static_cast<std::size_t>(v)] = static_cast<std::int16_t>(k);
    }
    for (const std::vector<int>& deep : connected_components(deep_mask, res)) {
      int owner = -1;
      for (int v : deep) {
        const int i = v % res, j = v / res;
        const int nb[4] = {i > 0 ? v - 1 : -1, i + 1 < res ? v + 1 : -1, j > 0 ? v - res : -1,
                           j + 1 < res ? v + res : -1};
        for (int w : nb) {
          if (w < 0 || deep_mask[static_cast<std::size_t>(w)]) continue;
          const int lw = label[static_cast<std::size_t>(w)];
          if (lw < 0 || (owner >= 0 && lw != owner)) {
            why = "deep region not enclosed by a single child";
            return std::nullopt;
          }
          owner = lw;
        }
      }
      if (owner < 0) {
        why = "isolated deep region";
        return std::nullopt;
      }
      for (int v : deep) label[static_cast<std::size_t>(v)] = static_cast<std::int16_t>(owner);
    }

    Expansion out;
    out.children.resize(comps.size());

    // Critical points strictly below the own band belong to exactly one child.
    for (int ci : crits_of(a.id)) {
      const CriticalPoint& cp = plane_.crits[static_cast<std::size_t>(ci)];
      if (cp.green_value >= s.value(l + 1) * (1.0 - 1e-9)) continue;
      auto node = grid.nearest(cp.location);
      if (!node || label[static_cast<std::size_t>(*node)] < 0) {
        why = "critical point not inside any child";
        return std::nullopt;
      }
      const int slot = label[static_cast<std::size_t>(*node)];
      const int i0 = *node % res, j0 = *node / res;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int i = i0 + di, j = j0 + dj;
          if (i < 0 || j < 0 || i >= res || j >= res || label[static_cast<std::size_t>(j * res + i)] != slot) {
            why = "critical point within one cell of a child boundary";
            return std::nullopt;
          }
        }
      }
      out.children[static_cast<std::size_t>(slot)].crits.push_back(ci);
      out.children[static_cast<std::size_t>(slot)].degree += cp.multiplicity;
    }

    const double h = grid.cell();
    for (std::size_t k = 0; k < comps.size(); ++k) {
      AnnulusComponent comp = make_component(grid, s, l + 1, static_cast<int>(k), comps[k]);
      std::map<VertexId, int> votes;
      for (const Complex& z : comp.sample_points) {
        if (auto target = image_target(a, plane_.poly(z))) ++votes[*target];
      }
      const int total = static_cast<int>(comp.sample_points.size());
      bool decided = false;
      for (const auto& [target, count] : votes) {
        if (10 * count >= 9 * total) {
          out.children[k].image = target;
          decided = true;
        }
      }
      if (!decided) {
        why = "child image not decided by sample vote";
        return std::nullopt;
      }
      Box b = comp.outer_boundary_box;
      b = {b.x0 - 2 * h, b.x1 + 2 * h, b.y0 - 2 * h, b.y1 + 2 * h};
      out.children[k].plane = PlaneRef{comp.sample_points.front(), b.squared(0.05)};
    }

    if (!local_cover_holds(a, out.children)) {
      why = "local cover accounting fails";
      return std::nullopt;
    }

    if (a.id.level == 0 || a.degree > 1) {
      LocalChart chart;
      chart.bounds = box;
      chart.resolution = res;
      chart.label = std::move(label);
      out.chart = std::move(chart);
    }
    return out;
  }

  Expansion expand_combinatorial(const Vertex& a) {
    const int l = a.id.level;
    const Vertex& fa = t_.at(*a.image);
    Expansion out;
    if (a.degree == 1) {
      for (const VertexId& b : fa.children) out.children.push_back({1, b, {}, std::nullopt});
      return out;
    }
    std::map<VertexId, std::vector<int>> mapped;
    for (int ci : crits_of(a.id)) {
      const CriticalPoint& cp = plane_.crits[static_cast<std::size_t>(ci)];
      if (cp.green_value >= plane_.scheme.value(l + 1) * (1.0 - 1e-9)) continue;
      auto target = image_target(a, plane_.poly(cp.location));
      if (!target) {
        throw ResolutionInsufficient("critical value of vertex " + to_string(a.id) +
                                     " cannot be located; increase the geometric depth");
      }
      mapped[*target].push_back(ci);
    }
    for (const VertexId& b : fa.children) {
      auto it = mapped.find(b);
      if (it == mapped.end()) {
        for (int k = 0; k < a.degree; ++k) out.children.push_back({1, b, {}, std::nullopt});
        continue;
      }
      int m = 0;
      for (int ci : it->second) m += plane_.crits[static_cast<std::size_t>(ci)].multiplicity;
      if (it->second.size() > 1 && m < a.degree - 1) {
        throw ResolutionInsufficient("critical placement below vertex " + to_string(a.id) +
                                     " is not determined combinatorially; increase the geometric depth");
      }
      out.children.push_back({1 + m, b, it->second, std::nullopt});
      for (int k = 0; k < a.degree - 1 - m; ++k) out.children.push_back({1, b, {}, std::nullopt});
    }
    return out;
  }

  PlaneTree& plane_;
  TreeWithDynamics& t_;
  const BuildOptions& options_;
  PlaneLocator locator_;
};

}  // namespace

PlaneTree build_plane_tree(const Polynomial& p, const BuildOptions& options) {
  if (options.max_level < 0) throw InvalidArgument("max_level must be nonnegative");
  if (options.grid_resolution < kMinGridResolution) throw InvalidArgument("grid resolution must be >= 256");
  std::vector<CriticalPoint> crits = critical_points(p);
  LevelScheme scheme = build_level_scheme(p, options.max_level, crits);
  PlaneTree plane{p, scheme, crits, make_extended_root(p.degree(), scheme.H, options.max_level), {}, 0, {}, {},
                  0};
  plane.geometric_depth = std::min(options.geometric_depth, options.max_level);
  plane.bounds = default_bounds(p, scheme);

  Vertex& root = plane.tree.at(plane.tree.root());
  const Complex c = p.centroid();
  const double reach = 0.5 * plane.bounds.width() * 1.5;
  auto r = radius_to_potential(p, c, 1.0, scheme.mid(0), reach);
  if (!r) throw PartitionInconsistency("cannot place a sample point in the top band");
  root.plane = PlaneRef{c + *r, plane.bounds};
  std::vector<int> all(crits.size());
  std::iota(all.begin(), all.end(), 0);
  plane.crits_inside[plane.tree.root()] = all;

  Builder(plane, options).run();
  return plane;
}

TreeWithDynamics build_tree(const Polynomial& p, const BuildOptions& options) {
  return build_plane_tree(p, options).tree;
}

}  // namespace juliaflow
