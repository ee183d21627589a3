#include <algorithm>
#include <cmath>
#include <numbers>

#include "juliaflow/error.hpp"
#include "juliaflow/plane_sampling.hpp"
#include "juliaflow/rng.hpp"

namespace juliaflow {

namespace {

// Newton iteration onto {g = target} along the gradient line.
std::optional<Complex> correct_onto(const Polynomial& p, Complex z, double target, const RayOptions& o) {
  for (int it = 0; it <= o.max_newton; ++it) {
    GreenSample s;
    try {
      s = green_with_gradient(p, z);
    } catch (const DegenerateGradient&) {
      return std::nullopt;
    }
    const double err = s.value - target;
    if (std::abs(err) <= o.tolerance * target) return z;
    if (it == o.max_newton) break;
    z -= err * s.gradient / std::norm(s.gradient);
  }
  return std::nullopt;
}

// dz/ds on the level curves, s = log g.
std::optional<Complex> flow(const Polynomial& p, Complex z, double s) {
  try {
    const Complex grad = green_with_gradient(p, z).gradient;
    return std::exp(s) * grad / std::norm(grad);
  } catch (const DegenerateGradient&) {
    return std::nullopt;
  }
}

std::optional<Complex> rk4_step(const Polynomial& p, Complex z, double s, double h) {
  const auto k1 = flow(p, z, s);
  if (!k1) return std::nullopt;
  const auto k2 = flow(p, z + 0.5 * h * *k1, s + 0.5 * h);
  if (!k2) return std::nullopt;
  const auto k3 = flow(p, z + 0.5 * h * *k2, s + 0.5 * h);
  if (!k3) return std::nullopt;
  const auto k4 = flow(p, z + h * *k3, s + h);
  if (!k4) return std::nullopt;
  return z + (h / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
}

}  // namespace

Complex ray_start(const Polynomial& p, double theta, double potential) {
  const int d = p.degree();
  const Complex lead = p.leading();
  // Boettcher coordinate ~ alpha (z - c) near infinity, alpha^(d-1) = leading coefficient.
  const Complex alpha = std::polar(std::pow(std::abs(lead), 1.0 / (d - 1)), std::arg(lead) / (d - 1));
  const Complex w = std::polar(std::exp(potential), 2.0 * std::numbers::pi * theta);
  Complex z = p.centroid() + w / alpha;
  if (auto c = correct_onto(p, z, potential, RayOptions{})) z = *c;
  return z;
}

RayTrace trace_ray(const Polynomial& p, const LevelScheme* scheme, double theta, double lambda_start,
                   double lambda_end, const RayOptions& o, const PlaneLocator* locator, int record_level) {
  if (!(lambda_end > 0.0) || !(lambda_start > lambda_end)) {
    throw InvalidArgument("ray potentials must satisfy lambda_start > lambda_end > 0");
  }
  if (scheme && !(lambda_start > scheme->value(0))) throw InvalidArgument("ray must start above lambda_0");
  RayTrace out;
  out.angle = theta - std::floor(theta);

  const int d = p.degree();
  const int H = scheme ? scheme->H : 1;
  const double h_max = std::log(static_cast<double>(d)) / (H * std::max(1, o.steps_per_level));
  const double s_start = std::log(lambda_start), s_end = std::log(lambda_end);

  // Targets in decreasing s; band midpoints are hit exactly.
  std::vector<double> targets;
  for (double s = s_start - h_max; s > s_end; s -= h_max) targets.push_back(s);
  targets.push_back(s_end);
  std::vector<std::pair<double, int>> records;
  if (locator && scheme) {
    for (int l = 0; l <= record_level; ++l) {
      const double s = std::log(scheme->mid(l));
      if (s < s_end || s > s_start) throw InvalidArgument("ray potential range misses a recorded band");
      records.emplace_back(s, l);
      targets.push_back(s);
    }
  }
  std::sort(targets.begin(), targets.end(), std::greater<>());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  Complex z = ray_start(p, out.angle, lambda_start);
  double s = s_start;
  auto record_point = [&](double target) {
    if (!o.keep_points) return;
    out.points.push_back(z);
    out.potentials.push_back(target);
  };
  record_point(lambda_start);

  std::size_t next_record = 0;
  std::sort(records.begin(), records.end(), std::greater<>());
  for (double s_target : targets) {
    double h = s_target - s;
    int halvings = 0;
    while (s > s_target) {
      h = std::max(h, s_target - s);
      const double s_next = s + h;
      const double target = std::exp(s_next);
      std::optional<Complex> accepted;
      if (auto pred = rk4_step(p, z, s, h)) {
        if (auto corr = correct_onto(p, *pred, target, o)) {
          // Reject corrections that jump off the predicted branch.
          if (std::abs(*corr - *pred) <= 0.25 * std::abs(*pred - z) + 1e-12 * std::abs(z)) accepted = corr;
        }
      }
      if (!accepted) {
        if (++halvings > o.max_halvings) {
          out.smooth = false;
          return out;
        }
        h *= 0.5;
        continue;
      }
      z = *accepted;
      s = s_next;
      const double err = std::abs(green_value(p, z) - target) / target;
      out.max_relative_error = std::max(out.max_relative_error, err);
      record_point(target);
    }
    s = s_target;
    while (next_record < records.size() && records[next_record].first >= s_target) {
      const int l = records[next_record].second;
      auto nest = locator->locate(z, l, std::exp(s_target));
      if (!nest) {
        out.smooth = false;
        return out;
      }
      out.annuli_visited.push_back(nest->back());
      ++next_record;
    }
  }
  return out;
}

RayTrace trace_ray(const PlaneTree& plane, const PlaneLocator& locator, double theta, int level,
                   const RayOptions& options) {
  const LevelScheme& scheme = plane.scheme;
  const Polynomial& p = plane.poly;
  const double alpha = std::pow(std::abs(p.leading()), 1.0 / (p.degree() - 1));
  const double start = std::max(std::log(alpha * 1e3 * p.escape_radius()), 2.0 * scheme.value(-1));
  const double end = 0.5 * (scheme.mid(level) + scheme.value(level + 1));
  return trace_ray(p, &scheme, theta, start, end, options, &locator, level);
}

RayEstimate estimate_omega_rays(const PlaneTree& plane, const MeasureAssignment& m, std::uint64_t n_angles,
                                std::uint64_t seed, int level) {
  constexpr int kMaxDraws = 16;
  const PlaneLocator locator(plane);
  RayOptions options;
  options.keep_points = false;
  RayEstimate est;
  std::vector<std::optional<EndPrefix>> prefixes;
  prefixes.reserve(n_angles);
  for (std::uint64_t i = 0; i < n_angles; ++i) {
    CounterRng rng(seed, i);
    std::optional<EndPrefix> prefix;
    for (int draw = 0; draw < kMaxDraws && !prefix; ++draw) {
      const RayTrace ray = trace_ray(plane, locator, rng.uniform(), level, options);
      if (!ray.smooth) {
        ++est.non_smooth;
        continue;
      }
      for (std::size_t l = 1; l < ray.annuli_visited.size(); ++l) {
        if (plane.tree.at(ray.annuli_visited[l]).parent != ray.annuli_visited[l - 1]) est.nesting_ok = false;
      }
      prefix = EndPrefix{ray.annuli_visited, std::nullopt};
    }
    prefixes.push_back(std::move(prefix));
  }
  if (static_cast<double>(est.non_smooth) > 0.01 * static_cast<double>(n_angles)) {
    throw ResolutionInsufficient("too many non-smooth rays: " + std::to_string(est.non_smooth) + " of " +
                                 std::to_string(n_angles));
  }
  est.report = compare_prefixes(plane.tree, m, prefixes, level, seed);
  return est;
}

}  // namespace juliaflow
