#include "juliaflow/harmonic_measure.hpp"

#include <algorithm>
#include <sstream>

#include "juliaflow/error.hpp"

namespace juliaflow {

namespace {

int ceil_div(int a, int b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

AxiomCheck make_check(std::string name) { return {std::move(name), true, {}}; }

void fail(AxiomCheck& c, VertexId id) {
  c.passed = false;
  c.offenders.push_back(id);
}

}  // namespace

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational power(const Rational& base, int exponent) {
  Rational out = 1;
  Rational b = exponent >= 0 ? base : Rational(1) / base;
  for (int k = 0; k < std::abs(exponent); ++k) out *= b;
  return out;
}

const Rational& MeasureAssignment::at(const VertexId& id) const {
  auto it = omega.find(id.level);
  if (it == omega.end() || id.index < 0 || id.index >= static_cast<int>(it->second.size())) {
    throw AxiomViolation("no measure for vertex " + to_string(id));
  }
  return it->second[static_cast<std::size_t>(id.index)];
}

MeasureAssignment compute_omega(const TreeWithDynamics& t) {
  MeasureAssignment m;
  m.d = t.d;
  m.H = t.H;
  for (const auto& [l, vs] : t.levels) {
    std::vector<Rational>& row = m.omega[l];
    row.reserve(vs.size());
    for (const Vertex& v : vs) {
      if (l <= 0) {
        row.emplace_back(1);
        continue;
      }
      if (!v.image) throw AxiomViolation("F-image missing at " + to_string(v.id));
      row.push_back(Rational(v.degree, t.d) * m.at(*v.image));
    }
  }
  if (t.contains(t.root()) && m.at(t.root()) != Rational(t.at(t.root()).degree, t.d)) {
    throw AxiomViolation("root measure does not follow from deg a_0 = d");
  }
  return m;
}

Rational omega_product(const TreeWithDynamics& t, const VertexId& a) {
  if (a.level < 1) throw InvalidArgument("product formula needs a vertex at level >= 1");
  const int k = ceil_div(a.level, t.H);
  Rational out = power(Rational(1, t.d), k);
  VertexId v = a;
  for (int n = 0; n < k; ++n) {
    out *= t.at(v).degree;
    v = t.iterate(v);
  }
  return out;
}

Rational omega_product_uncorrected(const TreeWithDynamics& t, const VertexId& a) {
  const int k = ceil_div(a.level, t.H);
  return omega_product(t, a) * t.at(t.iterate(a, k)).degree;
}

ValidationReport verify_flow(const TreeWithDynamics& t, const MeasureAssignment& m) {
  AxiomCheck flow = make_check("flow");
  AxiomCheck sums = make_check("level_sums");
  AxiomCheck range = make_check("mass_range");
  for (const auto& [l, vs] : t.levels) {
    Rational total = 0;
    for (const Vertex& v : vs) {
      const Rational& w = m.at(v.id);
      total += w;
      if (w <= 0 || w > 1) fail(range, v.id);
      if (l < t.max_level) {
        Rational below = 0;
        for (const VertexId& c : v.children) below += m.at(c);
        if (below != w) fail(flow, v.id);
      }
    }
    if (total != 1 && !vs.empty()) fail(sums, vs.front().id);
  }
  ValidationReport r;
  r.checks = {flow, sums, range};
  return r;
}

ValidationReport verify_f_invariance(const TreeWithDynamics& t, const MeasureAssignment& m) {
  AxiomCheck inv = make_check("f_invariance");
  std::map<VertexId, Rational> pulled;
  for (const auto& [l, vs] : t.levels) {
    for (const Vertex& v : vs) {
      if (v.image) pulled[*v.image] += m.at(v.id);
    }
  }
  for (const auto& [l, vs] : t.levels) {
    if (l + t.H > t.max_level) continue;
    for (const Vertex& v : vs) {
      auto it = pulled.find(v.id);
      if (it == pulled.end() || it->second != m.at(v.id)) fail(inv, v.id);
    }
  }
  ValidationReport r;
  r.checks = {inv};
  return r;
}

DecayReport decay_bound(const TreeWithDynamics& t, const MeasureAssignment& m,
                        const std::vector<CriticalPoint>& crits) {
  int M = 0;
  int e = 0;
  int mult = 0;
  for (const CriticalPoint& c : crits) {
    if (c.escaping) {
      ++e;
      mult += c.multiplicity;
    } else {
      M = std::max(M, c.multiplicity);
    }
  }
  return decay_bound(t, m, 1 + M, std::max(e, 1), std::max(mult, 1));
}

DecayReport decay_bound(const TreeWithDynamics& t, const MeasureAssignment& m, int D, int e, int m_count) {
  if (D >= t.d) throw InvalidArgument("decay bound is vacuous: D = d");
  DecayReport report;
  DecayBound& b = report.bound;
  b.D = D;
  b.H = t.H;
  b.e = e;
  b.m = m_count;

  // Exceptional levels; the F-orbit of a vertex meets at most one level per residue step of H.
  std::map<int, int> per_residue;
  for (const auto& [l, vs] : t.levels) {
    if (l < 0) continue;
    const bool exceptional =
        std::any_of(vs.begin(), vs.end(), [D](const Vertex& v) { return v.degree > D; });
    if (exceptional) {
      ++b.Q;
      ++per_residue[l % t.H];
    }
  }
  for (const auto& [r, count] : per_residue) b.q = std::max(b.q, count);
  const Rational ratio(D, t.d);
  b.c0 = power(Rational(t.d, D), b.q);

  for (const auto& [l, vs] : t.levels) {
    for (const Vertex& v : vs) {
      VertexBound vb;
      vb.id = v.id;
      vb.rhs = b.c0 * power(ratio, ceil_div(l, t.H));
      const Rational& w = m.at(v.id);
      vb.ok = w <= vb.rhs;
      vb.attained = w * b.c0 >= vb.rhs;
      const Rational rhs_e = b.c0 * power(ratio, ceil_div(l, e));
      const Rational rhs_m = b.c0 * power(ratio, ceil_div(l, m_count));
      if (!(w <= vb.rhs && vb.rhs <= rhs_e && rhs_e <= rhs_m)) report.chained_ok = false;
      report.all_ok = report.all_ok && vb.ok;
      if (l >= 0) report.all_attained = report.all_attained && vb.attained;
      report.vertices.push_back(std::move(vb));
    }
  }
  return report;
}

Rational cone_measure(const MeasureAssignment& m, const Cone& c) { return m.at(c.base); }

std::vector<Rational> subset_measure_limit(const TreeWithDynamics& t, const MeasureAssignment& m,
                                           const VertexPredicate& marked, const std::vector<int>& levels) {
  std::vector<Rational> out;
  for (int l : levels) {
    Rational total = 0;
    for (const Vertex& v : t.level(l)) {
      if (marked(v.id)) total += m.at(v.id);
    }
    out.push_back(total);
  }
  return out;
}

EndDecay end_decay(const TreeWithDynamics& t, const MeasureAssignment& m, const EndPrefix& x) {
  EndDecay out;
  out.degree = t.at(x.path.back()).degree;
  const Rational ratio(out.degree, t.d);
  std::vector<Rational> scaled;
  for (std::size_t l = 0; l < x.path.size(); ++l) {
    out.omega.push_back(m.at(x.path[l]));
    scaled.push_back(out.omega.back() / power(ratio, ceil_div(static_cast<int>(l), t.H)));
  }
  out.c = *std::max_element(scaled.begin(), scaled.end());
  for (std::size_t l = 1; l < x.path.size(); ++l) {
    if (t.at(x.path[l - 1]).degree < t.d && !(out.omega[l] < out.omega[l - 1])) {
      out.strictly_decreasing = false;
    }
  }
  for (std::size_t l = scaled.size() / 2 + 1; l < scaled.size(); ++l) {
    if (scaled[l] > scaled[l - 1]) out.ratio_nonincreasing_tail = false;
  }
  return out;
}

std::string measure_csv(const TreeWithDynamics& t, const MeasureAssignment& m, const DecayReport& decay) {
  std::ostringstream out;
  out << "level,index,deg,omega_num,omega_den,bound_rhs_num,bound_rhs_den,bound_ok\n";
  std::map<VertexId, const VertexBound*> by_id;
  for (const VertexBound& vb : decay.vertices) by_id[vb.id] = &vb;
  for (const auto& [l, vs] : t.levels) {
    for (const Vertex& v : vs) {
      const Rational& w = m.at(v.id);
      const VertexBound* vb = by_id.at(v.id);
      out << l << ',' << v.id.index << ',' << v.degree << ',' << numerator(w) << ',' << denominator(w) << ','
          << numerator(vb->rhs) << ',' << denominator(vb->rhs) << ',' << (vb->ok ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

}  // namespace juliaflow
