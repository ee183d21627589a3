#pragma once

#include <map>
#include <vector>

#include "juliaflow/polynomial.hpp"

namespace juliaflow {

// Distinguished potentials: lambda(l - H) == d * lambda(l), strictly decreasing in l.
struct LevelScheme {
  int degree = 2;
  int H = 1;
  double top_level_value = 0.0;  // lambda_1
  int max_level = 0;
  // Class representatives r_1 = lambda_1 > r_2 > ... > r_H > lambda_1 / d.
  std::vector<double> representatives;
  // Materialized values for levels -1 .. max_level + 1.
  std::map<int, double> lambda;

  double value(int level) const;
  // Level l with lambda(l + 1) < g <= lambda(l). Requires g > 0.
  int band_of(double g) const;
  // Geometric midpoint of band l.
  double mid(int level) const;
};

LevelScheme build_level_scheme(const Polynomial& p, int max_level);
LevelScheme build_level_scheme(const Polynomial& p, int max_level,
                               const std::vector<CriticalPoint>& crits);

}  // namespace juliaflow
