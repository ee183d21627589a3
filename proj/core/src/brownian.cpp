#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "juliaflow/error.hpp"
#include "juliaflow/plane_sampling.hpp"
#include "juliaflow/rng.hpp"

namespace juliaflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Distance from z along u to {g <= floor}: march with steps from the local linear
// estimate (growth at most doubling), then bisect the last bracket.
double distance_along(const Polynomial& p, Complex z, Complex u, double floor, double first_step, double cap) {
  auto clear = [&](double r) { return green_value_floor(p, z + r * u, floor) > floor; };
  double lo = 0.0, hi = -1.0, t = 0.0, step = first_step;
  for (int it = 0; it < 200; ++it) {
    lo = t;
    t += step;
    if (t >= cap) {
      if (clear(cap)) return cap;
      hi = cap;
      break;
    }
    const Complex w = z + t * u;
    double gw = 0.0, grad = 0.0;
    try {
      const GreenSample s = green_with_gradient(p, w);
      gw = s.value;
      grad = std::abs(s.gradient);
    } catch (const DegenerateGradient&) {
      gw = green_value(p, w);
      grad = 0.0;
    }
    if (gw <= floor) {
      hi = t;
      break;
    }
    const double linear = grad > 0.0 ? 0.5 * (gw - floor) / grad : step;
    step = std::min(linear, t + first_step);
    if (step < 1e-13 * (std::abs(w) + 1.0)) return t;
  }
  if (hi < 0.0) return t;
  for (int it = 0; it < 8; ++it) {
    const double mid = 0.5 * (lo + hi);
    (clear(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

BrownianRun brownian_first_entry(const PlaneTree& plane, const PlaneLocator& locator, std::uint64_t seed,
                                 std::uint64_t index, int level, std::optional<double> entry_potential,
                                 const BrownianOptions& o) {
  const Polynomial& p = plane.poly;
  const LevelScheme& scheme = plane.scheme;
  if (level < 0 || level > plane.tree.max_level) throw InvalidArgument("itinerary level out of range");
  const double eps = entry_potential.value_or(scheme.value(level + 1));
  if (!(eps > 0.0)) throw InvalidArgument("entry potential must be positive");
  // Stopping shell (eps, eps (1 + kappa)] lies inside band `level`.
  const double kappa = 0.05 * std::min(1.0, scheme.value(level) / eps - 1.0);

  BrownianRun run;
  run.seed = seed;
  run.index = index;
  CounterRng rng(seed, index);
  // The plane bounds enclose {g <= lambda_0} with margin, hence the whole stopping set.
  const Complex c = plane.bounds.center();
  const double rho = 0.5 * plane.bounds.width();

  Complex z = c + std::polar(rho, kTwoPi * rng.uniform());
  std::set<VertexId> seen;
  double g = 0.0;
  bool entered = false;
  for (run.steps = 0; run.steps < o.max_steps; ++run.steps) {
    if (std::abs(z - c) > rho) {
      // Return to the circle with the exterior Poisson kernel (inverted point, Moebius push-forward).
      const Complex a = rho / std::conj(z - c);
      const Complex e = std::polar(1.0, kTwoPi * rng.uniform());
      z = c + rho * (e + a) / (1.0 + std::conj(a) * e);
      continue;
    }
    double grad_norm = 0.0;
    try {
      const GreenSample s = green_with_gradient(p, z);
      g = s.value;
      grad_norm = std::abs(s.gradient);
    } catch (const DegenerateGradient&) {
      g = green_value(p, z);
      grad_norm = std::numeric_limits<double>::infinity();
    }
    if (o.record_itinerary && g > 0.0 && g <= scheme.value(0)) {
      const int l = std::min(scheme.band_of(g), plane.tree.max_level);
      if (auto nest = locator.locate(z, l, g); nest && seen.insert(nest->back()).second) {
        run.itinerary.push_back(nest->back());
      }
    }
    if (g <= eps) {
      entered = true;
      break;
    }
    if (g - eps <= kappa * eps) {
      entered = true;
      break;
    }
    // Candidate radius from the local linear estimate, shortened by sampled directions.
    const double limit =
        std::isfinite(grad_norm) && grad_norm > 0.0 ? 0.5 * (g - eps) / grad_norm : 0.01 * rho;
    const double phase = kTwoPi * rng.uniform();
    double dist = limit;
    for (int k = 0; k < o.directions; ++k) {
      const Complex u = std::polar(1.0, phase + kTwoPi * k / o.directions);
      dist = std::min(dist, distance_along(p, z, u, eps, 0.5 * limit, limit));
    }
    const double r = o.shrink * dist;
    if (!(r > 0.0)) break;
    z += std::polar(r, kTwoPi * rng.uniform());
  }
  run.first_entry = z;
  run.entry_g = g;
  if (!entered) {
    run.abandoned = true;
    return run;
  }
  if (auto nest = locator.locate(z, level, g)) {
    run.loop_erased_itinerary = std::move(*nest);
  } else {
    run.abandoned = true;
  }
  return run;
}

BrownianEstimate estimate_omega_brownian(const PlaneTree& plane, const MeasureAssignment& m, std::uint64_t runs,
                                         std::uint64_t seed, int level, std::optional<double> entry_potential,
                                         const BrownianOptions& options) {
  const PlaneLocator locator(plane);
  BrownianEstimate est;
  std::vector<std::optional<EndPrefix>> prefixes;
  prefixes.reserve(runs);
  for (std::uint64_t i = 0; i < runs; ++i) {
    BrownianRun run = brownian_first_entry(plane, locator, seed, i, level, entry_potential, options);
    if (run.abandoned) {
      prefixes.emplace_back();
    } else {
      const auto& nest = run.loop_erased_itinerary;
      for (std::size_t l = 1; l < nest.size(); ++l) {
        if (plane.tree.at(nest[l]).parent != nest[l - 1]) {
          ++est.nesting_failures;
          break;
        }
      }
      prefixes.push_back(EndPrefix{nest, std::nullopt});
    }
    est.runs.push_back(std::move(run));
  }
  est.report = compare_prefixes(plane.tree, m, prefixes, level, seed);
  return est;
}

VertexPredicate island_marker(const TreeWithDynamics& t, int horizon, int period_bound) {
  // Vertices of levels >= 1 on critical periodic ends detected at the deepest level.
  auto on_end = std::make_shared<std::set<VertexId>>();
  for (VertexId y : critical_periodic_vertices(t, t.max_level, period_bound)) {
    while (y.level >= 1 && on_end->insert(y).second) y = *t.at(y).parent;
  }
  return [&t, horizon, on_end](const VertexId& v) {
    for (int k = 0; k <= horizon; ++k) {
      if (v.level - k * t.H < 0) return true;
      if (on_end->count(t.iterate(v, k)) > 0) return true;
    }
    return false;
  };
}

IslandReport island_entry_experiment(const PlaneTree& plane, const MeasureAssignment& m, std::uint64_t runs,
                                  int level, std::uint64_t seed, const std::vector<int>& trend_levels,
                                  int horizon) {
  const TreeWithDynamics& t = plane.tree;
  IslandReport r;
  r.level = level;
  r.runs = runs;
  r.vacuous = critical_periodic_vertices(t, t.max_level, 8).empty();
  if (r.vacuous) return r;

  const VertexPredicate marked = island_marker(t, horizon);
  const DecayReport decay = decay_bound(t, m, plane.crits);
  r.exact_mass = 0;
  for (const Vertex& v : t.level(level)) {
    if (!marked(v.id)) continue;
    ++r.marked_count;
    r.exact_mass += m.at(v.id);
  }
  const int k = (level + t.H - 1) / t.H;
  r.bound = Rational(static_cast<long long>(r.marked_count)) * decay.bound.c0 *
            power(Rational(decay.bound.D, t.d), k);
  r.within_bound = r.exact_mass <= r.bound;

  if (!trend_levels.empty()) {
    r.trend_levels = trend_levels;
    r.trend_mass = subset_measure_limit(t, m, marked, trend_levels);
    for (std::size_t i = 1; i < r.trend_mass.size(); ++i) {
      if (!(r.trend_mass[i] < r.trend_mass[i - 1])) r.trend_decreasing = false;
    }
  }

  if (runs > 0) {
    const BrownianEstimate est = estimate_omega_brownian(plane, m, runs, seed, level);
    r.completed = est.report.n_samples - est.report.abandoned;
    for (const auto& [id, count] : est.report.counts) {
      if (marked(id)) r.hits += count;
    }
    const double mass = to_double(r.exact_mass);
    r.empirical = r.completed ? static_cast<double>(r.hits) / static_cast<double>(r.completed) : 0.0;
    r.band = binomial_band(mass, r.completed);
    r.consistent = std::abs(r.empirical - mass) <= r.band + 1e-12;
  }
  return r;
}

std::string island_summary(const IslandReport& r) {
  std::ostringstream out;
  if (r.vacuous) {
    out << "islands: none (vacuous pass)\n";
    return out.str();
  }
  out << "island_level," << r.level << '\n';
  out << "island_vertices," << r.marked_count << '\n';
  out << "island_mass_exact," << r.exact_mass << ',' << to_double(r.exact_mass) << '\n';
  out << "island_mass_bound," << r.bound << ',' << to_double(r.bound) << ',' << (r.within_bound ? "ok" : "FAIL")
      << '\n';
  out << "island_hits," << r.hits << " of " << r.completed << '\n';
  out << "island_fraction," << r.empirical << ",band," << r.band << ',' << (r.consistent ? "ok" : "FAIL") << '\n';
  for (std::size_t i = 0; i < r.trend_levels.size(); ++i) {
    out << "island_trend," << r.trend_levels[i] << ',' << r.trend_mass[i] << ',' << to_double(r.trend_mass[i])
        << '\n';
  }
  if (!r.trend_levels.empty()) out << "island_trend_decreasing," << (r.trend_decreasing ? "yes" : "no") << '\n';
  return out.str();
}

}  // namespace juliaflow
