#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "juliaflow/polynomial.hpp"
#include "juliaflow/tree.hpp"

namespace juliaflow {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct MeasureAssignment {
  int d = 2;
  int H = 1;
  std::map<int, std::vector<Rational>> omega;  // indexed like TreeWithDynamics::levels

  const Rational& at(const VertexId& id) const;
};

MeasureAssignment compute_omega(const TreeWithDynamics& t);

// d^{-k} prod_{n=0}^{k-1} deg F^n(a), k = ceil(l/H).
Rational omega_product(const TreeWithDynamics& t, const VertexId& a);
// Same product with upper limit k, as it is sometimes printed.
Rational omega_product_uncorrected(const TreeWithDynamics& t, const VertexId& a);

ValidationReport verify_flow(const TreeWithDynamics& t, const MeasureAssignment& m);
ValidationReport verify_f_invariance(const TreeWithDynamics& t, const MeasureAssignment& m);

struct DecayBound {
  int D = 1;
  Rational c0;
  int H = 1;
  int Q = 0;  // levels >= 0 hosting a vertex of degree > D
  int q = 0;  // exponent of c0 = (d/D)^q
  int e = 1;  // distinct escaping critical points
  int m = 1;  // escaping critical points with multiplicity
};

struct VertexBound {
  VertexId id;
  Rational rhs;
  bool ok = true;
  bool attained = false;  // Omega >= rhs / c0
};

struct DecayReport {
  DecayBound bound;
  std::vector<VertexBound> vertices;
  bool all_ok = true;
  bool chained_ok = true;
  bool all_attained = true;
};

// D = 1 + (largest multiplicity of a bounded critical point).
DecayReport decay_bound(const TreeWithDynamics& t, const MeasureAssignment& m,
                        const std::vector<CriticalPoint>& crits);
DecayReport decay_bound(const TreeWithDynamics& t, const MeasureAssignment& m, int D, int e, int m_count);

struct Cone {
  VertexId base;
};

Rational cone_measure(const MeasureAssignment& m, const Cone& c);

using VertexPredicate = std::function<bool(const VertexId&)>;

// Sum of Omega over marked vertices, one entry per level.
std::vector<Rational> subset_measure_limit(const TreeWithDynamics& t, const MeasureAssignment& m,
                                           const VertexPredicate& marked, const std::vector<int>& levels);

struct EndDecay {
  std::vector<Rational> omega;  // Omega(x_l), l = 0..L
  int degree = 1;               // deg x_L
  Rational c;                   // smallest constant with Omega(x_l) <= c (deg/d)^{ceil(l/H)}
  bool strictly_decreasing = true;  // once degrees are below d
  bool ratio_nonincreasing_tail = true;
};

EndDecay end_decay(const TreeWithDynamics& t, const MeasureAssignment& m, const EndPrefix& x);

std::string measure_csv(const TreeWithDynamics& t, const MeasureAssignment& m, const DecayReport& decay);

double to_double(const Rational& r);
Rational power(const Rational& base, int exponent);

}  // namespace juliaflow
