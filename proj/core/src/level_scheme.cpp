#include "juliaflow/level_scheme.hpp"

#include <algorithm>
#include <cmath>

#include "juliaflow/error.hpp"

namespace juliaflow {

namespace {

constexpr double kClassTolerance = 1e-9;

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

double LevelScheme::value(int level) const {
  const int shifted = level - 1;
  const int q = floor_div(shifted, H);
  const int j = shifted - q * H;
  return representatives[static_cast<std::size_t>(j)] * std::pow(static_cast<double>(degree), -q);
}

int LevelScheme::band_of(double g) const {
  const double u = std::log(g / top_level_value) / std::log(static_cast<double>(degree));
  int l = 1 + static_cast<int>(std::floor(-u * H));
  while (g > value(l)) --l;
  while (g <= value(l + 1)) ++l;
  return l;
}

double LevelScheme::mid(int level) const { return std::sqrt(value(level) * value(level + 1)); }

LevelScheme build_level_scheme(const Polynomial& p, int max_level) {
  return build_level_scheme(p, max_level, critical_points(p));
}

LevelScheme build_level_scheme(const Polynomial& p, int max_level,
                               const std::vector<CriticalPoint>& crits) {
  LevelScheme s;
  s.degree = p.degree();
  s.max_level = max_level;
  std::vector<double> escaping;
  for (const CriticalPoint& c : crits) {
    if (c.escaping) escaping.push_back(c.green_value);
  }
  if (escaping.empty()) {
    throw ConnectedJuliaSet("no critical point escapes; the Julia set is connected");
  }
  s.top_level_value = *std::max_element(escaping.begin(), escaping.end());

  // Reduce each value to u in (-1, 0] with g = lambda_1 * d^u, then merge classes mod 1.
  const double log_d = std::log(static_cast<double>(s.degree));
  std::vector<double> us;
  for (double g : escaping) {
    double u = std::log(g / s.top_level_value) / log_d;
    u -= std::ceil(u - kClassTolerance);
    if (u > 0.0) u = 0.0;
    if (u <= -1.0 + kClassTolerance) u = 0.0;
    bool merged = false;
    for (double existing : us) {
      if (std::abs(existing - u) <= kClassTolerance * std::max(1.0, std::abs(u))) merged = true;
    }
    if (!merged) us.push_back(u);
  }
  std::sort(us.begin(), us.end(), std::greater<>());
  s.H = static_cast<int>(us.size());
  for (double u : us) s.representatives.push_back(s.top_level_value * std::exp(u * log_d));
  s.representatives.front() = s.top_level_value;

  for (int l = -1; l <= max_level + 1; ++l) s.lambda[l] = s.value(l);
  return s;
}

}  // namespace juliaflow
