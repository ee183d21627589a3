#include "juliaflow/tree.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "juliaflow/error.hpp"

namespace juliaflow {

std::string to_string(const VertexId& id) {
  return "(" + std::to_string(id.level) + "," + std::to_string(id.index) + ")";
}

bool TreeWithDynamics::contains(const VertexId& id) const {
  auto it = levels.find(id.level);
  return it != levels.end() && id.index >= 0 && id.index < static_cast<int>(it->second.size());
}

const Vertex& TreeWithDynamics::at(const VertexId& id) const {
  if (!contains(id)) throw AxiomViolation("unknown vertex " + juliaflow::to_string(id));
  return levels.at(id.level)[static_cast<std::size_t>(id.index)];
}

Vertex& TreeWithDynamics::at(const VertexId& id) {
  if (!contains(id)) throw AxiomViolation("unknown vertex " + juliaflow::to_string(id));
  return levels.at(id.level)[static_cast<std::size_t>(id.index)];
}

const std::vector<Vertex>& TreeWithDynamics::level(int l) const {
  static const std::vector<Vertex> empty;
  auto it = levels.find(l);
  return it == levels.end() ? empty : it->second;
}

std::size_t TreeWithDynamics::vertex_count() const {
  std::size_t n = 0;
  for (const auto& [l, vs] : levels) n += vs.size();
  return n;
}

VertexId TreeWithDynamics::iterate(VertexId v, int n) const {
  for (int k = 0; k < n; ++k) {
    const Vertex& x = at(v);
    if (!x.image) throw AxiomViolation("F-image missing at " + juliaflow::to_string(v));
    v = *x.image;
  }
  return v;
}

VertexId TreeWithDynamics::ancestor(VertexId v, int l) const {
  while (v.level > l) {
    const Vertex& x = at(v);
    if (!x.parent) throw AxiomViolation("parent missing at " + juliaflow::to_string(v));
    v = *x.parent;
  }
  return v;
}

int extended_root_depth(int H, int max_level) {
  const int chain = (max_level + H - 1) / H + 1;
  return std::max(chain, H);
}

TreeWithDynamics make_extended_root(int d, int H, int max_level) {
  TreeWithDynamics t;
  t.d = d;
  t.H = H;
  t.max_level = max_level;
  t.min_level = -extended_root_depth(H, max_level);
  for (int l = t.min_level; l <= 0; ++l) {
    Vertex v;
    v.id = {l, 0};
    v.degree = d;
    if (l > t.min_level) v.parent = VertexId{l - 1, 0};
    if (l < 0) v.children.push_back({l + 1, 0});
    if (l - H >= t.min_level) v.image = VertexId{l - H, 0};
    t.levels[l].push_back(v);
  }
  return t;
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
}

const AxiomCheck* ValidationReport::find(const std::string& name) const {
  for (const AxiomCheck& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const AxiomCheck& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) {
      out << " at";
      const std::size_t shown = std::min<std::size_t>(c.offenders.size(), 8);
      for (std::size_t k = 0; k < shown; ++k) out << ' ' << juliaflow::to_string(c.offenders[k]);
      if (c.offenders.size() > shown) out << " (+" << c.offenders.size() - shown << " more)";
    }
    out << '\n';
  }
  return out.str();
}

ValidationReport verify_axioms(const TreeWithDynamics& t) {
  AxiomCheck structure{"parent_child_consistency", true, {}};
  AxiomCheck no_leaves{"no_leaves", true, {}};
  AxiomCheck finite{"locally_finite", true, {}};
  AxiomCheck root_children{"root_two_children", true, {}};
  AxiomCheck ext_root{"extended_root_chain", true, {}};
  AxiomCheck shift{"level_shift", true, {}};
  AxiomCheck preserving{"children_preserving", true, {}};
  AxiomCheck cover{"local_cover", true, {}};
  AxiomCheck monotone{"degree_monotone", true, {}};
  AxiomCheck bounds{"degree_bounds", true, {}};
  AxiomCheck preimages{"d_preimages", true, {}};

  auto fail = [](AxiomCheck& c, VertexId id) {
    c.passed = false;
    if (c.offenders.empty() || c.offenders.back() != id) c.offenders.push_back(id);
  };

  std::map<VertexId, int> preimage_degree;
  for (const auto& [l, vs] : t.levels) {
    for (const Vertex& v : vs) {
      // Structure.
      if (v.id.level != l) fail(structure, v.id);
      if (v.parent) {
        if (!t.contains(*v.parent) || v.parent->level != l - 1) {
          fail(structure, v.id);
        } else {
          const auto& sib = t.at(*v.parent).children;
          if (std::find(sib.begin(), sib.end(), v.id) == sib.end()) fail(structure, v.id);
          if (v.degree > t.at(*v.parent).degree) fail(monotone, v.id);
        }
      } else if (l != t.min_level) {
        fail(structure, v.id);
      }
      for (const VertexId& c : v.children) {
        if (!t.contains(c) || c.level != l + 1 || t.at(c).parent != v.id) fail(structure, v.id);
      }
      if (l < t.max_level && v.children.empty()) fail(no_leaves, v.id);
      if (v.children.size() > static_cast<std::size_t>(1) << 24) fail(finite, v.id);

      // Degrees.
      if (l <= 0) {
        if (v.degree != t.d) fail(bounds, v.id);
        if (l < 0 && v.children.size() != 1) fail(ext_root, v.id);
        if (vs.size() != 1) fail(ext_root, v.id);
      } else if (v.degree < 1 || v.degree >= t.d) {
        fail(bounds, v.id);
      }

      // Dynamics.
      if (!v.image) {
        if (l - t.H >= t.min_level) fail(shift, v.id);
        continue;
      }
      if (!t.contains(*v.image) || v.image->level != l - t.H) {
        fail(shift, v.id);
        continue;
      }
      preimage_degree[*v.image] += v.degree;
      const Vertex& fv = t.at(*v.image);
      if (v.children.empty()) continue;
      std::map<VertexId, int> over;
      for (const VertexId& c : v.children) {
        if (!t.contains(c)) continue;
        const Vertex& cv = t.at(c);
        if (!cv.image) {
          fail(preserving, c);
          continue;
        }
        if (std::find(fv.children.begin(), fv.children.end(), *cv.image) == fv.children.end()) {
          fail(preserving, c);
          continue;
        }
        over[*cv.image] += cv.degree;
      }
      if (fv.children.empty()) {
        fail(cover, v.id);
        continue;
      }
      for (const VertexId& b : fv.children) {
        auto it = over.find(b);
        if (it == over.end() || it->second != v.degree) {
          fail(cover, v.id);
          break;
        }
      }
    }
  }

  if (!t.contains(t.root()) || t.at(t.root()).children.size() < 2) {
    if (t.max_level >= 1) fail(root_children, t.root());
  }

  for (const auto& [l, vs] : t.levels) {
    if (l + t.H > t.max_level) continue;
    for (const Vertex& v : vs) {
      auto it = preimage_degree.find(v.id);
      if (it == preimage_degree.end() || it->second != t.d) fail(preimages, v.id);
    }
  }

  ValidationReport report;
  report.checks = {structure, no_leaves, finite, root_children, ext_root, shift,
                   preserving, cover, monotone, bounds, preimages};
  return report;
}

}  // namespace juliaflow
