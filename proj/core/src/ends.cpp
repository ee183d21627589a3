#include "juliaflow/tree.hpp"

#include <algorithm>
#include <cmath>

#include "juliaflow/error.hpp"

namespace juliaflow {

EndPrefix prefix_to(const TreeWithDynamics& t, VertexId v) {
  EndPrefix out;
  while (v.level > 0) {
    out.path.push_back(v);
    v = *t.at(v).parent;
  }
  out.path.push_back(v);
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

double end_distance(const EndPrefix& x, const EndPrefix& y, bool declared_equal) {
  const std::size_t n = std::min(x.path.size(), y.path.size());
  if (n == 0) throw InsufficientDepth("empty end prefix");
  std::size_t common = 0;
  while (common < n && x.path[common] == y.path[common]) ++common;
  if (common == n) {
    if (declared_equal && x.path.size() == y.path.size()) return 0.0;
    throw InsufficientDepth("prefixes agree to their full depth");
  }
  if (common == 0) throw InvalidArgument("prefixes do not share the root");
  return std::exp(-static_cast<double>(x.path[common - 1].level));
}

std::string to_string(EndClass c) {
  switch (c) {
    case EndClass::Singleton:
      return "singleton";
    case EndClass::Island:
      return "island";
    case EndClass::Undecided:
      return "undecided";
  }
  return "undecided";
}

bool is_critical_periodic(const TreeWithDynamics& t, VertexId y, int period_bound) {
  const int M = y.level;
  if (M < 1 || t.at(y).degree <= 1) return false;
  const EndPrefix chain = prefix_to(t, y);
  for (int p = 1; p <= period_bound; ++p) {
    const int shift = p * t.H;
    if (M - shift < 1) break;
    bool ok = true;
    for (int j = M; j >= shift + 1 && ok; --j) {
      const VertexId a = chain.path[static_cast<std::size_t>(j)];
      ok = t.at(a).degree > 1 && t.iterate(a, p) == chain.path[static_cast<std::size_t>(j - shift)];
    }
    if (ok) return true;
  }
  return false;
}

EndClass classify_end(const TreeWithDynamics& t, const EndPrefix& x, const ClassifyOptions& options) {
  if (x.path.empty()) return EndClass::Undecided;
  const VertexId last = x.path.back();
  if (last.level < (options.period_bound + 1) * t.H) return EndClass::Undecided;
  VertexId y = last;
  for (int k = 0; k <= options.preimage_bound; ++k) {
    if (y.level < 1) break;
    if (is_critical_periodic(t, y, options.period_bound)) return EndClass::Island;
    y = t.iterate(y);
  }
  if (t.at(last).degree == 1) return EndClass::Singleton;
  return EndClass::Undecided;
}

std::vector<VertexId> critical_periodic_vertices(const TreeWithDynamics& t, int level, int period_bound) {
  std::vector<VertexId> out;
  for (const Vertex& v : t.level(level)) {
    if (is_critical_periodic(t, v.id, period_bound)) out.push_back(v.id);
  }
  return out;
}

std::vector<EndPrefix> fixed_ends(const TreeWithDynamics& t, int level) {
  std::vector<EndPrefix> alive{EndPrefix{{t.root()}, std::nullopt}};
  for (int l = 1; l <= level; ++l) {
    std::vector<EndPrefix> next;
    for (const EndPrefix& e : alive) {
      for (const VertexId& c : t.at(e.path.back()).children) {
        const bool fixed = l < t.H || t.at(c).image == e.path[static_cast<std::size_t>(l - t.H)];
        if (!fixed) continue;
        EndPrefix grown = e;
        grown.path.push_back(c);
        next.push_back(std::move(grown));
      }
    }
    alive = std::move(next);
  }
  for (EndPrefix& e : alive) e.declared_degree = t.at(e.path.back()).degree;
  return alive;
}

}  // namespace juliaflow
