#include "juliaflow/tree_walk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "juliaflow/error.hpp"
#include "juliaflow/rng.hpp"

namespace juliaflow {

WalkMode parse_walk_mode(const std::string& s) {
  if (s == "loop_erased" || s == "loop-erased") return WalkMode::LoopErased;
  if (s == "nearest_neighbor" || s == "nearest-neighbor") return WalkMode::NearestNeighbor;
  throw InvalidArgument("unknown walk mode '" + s + "'");
}

std::string to_string(WalkMode mode) {
  return mode == WalkMode::LoopErased ? "loop_erased" : "nearest_neighbor";
}

StepDistribution step_distribution(const TreeWithDynamics& t, const MeasureAssignment& m, const VertexId& a,
                                   WalkMode mode) {
  const Vertex& v = t.at(a);
  if (a.level >= t.max_level || v.children.empty()) {
    throw InsufficientDepth("vertex " + to_string(a) + " is on the frontier");
  }
  const Rational& wa = m.at(a);
  const bool has_parent = v.parent.has_value();
  const Rational down = (mode == WalkMode::NearestNeighbor && has_parent) ? Rational(1, 2) : Rational(1);
  StepDistribution out;
  if (mode == WalkMode::NearestNeighbor && has_parent) out.emplace_back(*v.parent, Rational(1, 2));
  for (const VertexId& c : v.children) out.emplace_back(c, down * m.at(c) / wa);
  return out;
}

Walker::Walker(const TreeWithDynamics& t, const MeasureAssignment& m, int target_level)
    : tree_(&t), target_level_(target_level) {
  if (target_level < 0 || target_level > t.max_level) {
    throw InvalidArgument("target level must lie in [0, max_level]");
  }
  for (const auto& [l, vs] : t.levels) {
    if (l >= target_level) break;
    std::vector<Row>& rows = rows_[l];
    rows.reserve(vs.size());
    for (const Vertex& v : vs) {
      Row r;
      r.children = v.children;
      const double total = to_double(m.at(v.id));
      double acc = 0.0;
      for (const VertexId& c : v.children) {
        acc += to_double(m.at(c)) / total;
        r.cumulative.push_back(acc);
      }
      if (!r.cumulative.empty()) r.cumulative.back() = 1.0;
      rows.push_back(std::move(r));
    }
  }
}

const Walker::Row& Walker::row(const VertexId& v) const {
  return rows_.at(v.level)[static_cast<std::size_t>(v.index)];
}

std::optional<EndPrefix> Walker::sample(const WalkConfig& cfg, std::uint64_t index) const {
  CounterRng rng(cfg.seed, index);
  auto pick_child = [&](const VertexId& v) {
    const Row& r = row(v);
    if (r.children.empty()) throw AxiomViolation("leaf at " + to_string(v));
    const double u = rng.uniform();
    const auto it = std::upper_bound(r.cumulative.begin(), r.cumulative.end(), u);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - r.cumulative.begin()),
                                                r.children.size() - 1);
    return r.children[k];
  };

  VertexId v = tree_->root();
  if (cfg.mode == WalkMode::LoopErased) {
    while (v.level < target_level_) v = pick_child(v);
    return prefix_to(*tree_, v);
  }
  // The first vertex reached at the target level is distributed like its loop erasure.
  for (int step = 0; step < cfg.max_steps && v.level < target_level_; ++step) {
    const auto& parent = tree_->at(v).parent;
    if (parent && rng.uniform() < 0.5) {
      v = *parent;
    } else {
      v = pick_child(v);
    }
  }
  if (v.level < target_level_) return std::nullopt;
  return prefix_to(*tree_, v);
}

std::optional<EndPrefix> sample_end(const TreeWithDynamics& t, const MeasureAssignment& m, const WalkConfig& cfg,
                                    std::uint64_t index) {
  return Walker(t, m, cfg.target_level).sample(cfg, index);
}

bool SampleReport::any_flag() const {
  return std::any_of(rows.begin(), rows.end(), [](const ConeComparison& r) { return r.flag; });
}

double binomial_band(double p, std::uint64_t n, double sigmas) {
  if (n == 0) return 0.0;
  return sigmas * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

SampleReport compare_prefixes(const TreeWithDynamics& t, const MeasureAssignment& m,
                              const std::vector<std::optional<EndPrefix>>& prefixes, int target_level,
                              std::uint64_t seed) {
  SampleReport report;
  report.seed = seed;
  report.n_samples = prefixes.size();
  std::map<VertexId, std::uint64_t> through;
  for (const auto& p : prefixes) {
    if (!p || static_cast<int>(p->path.size()) <= target_level) {
      ++report.abandoned;
      continue;
    }
    for (int l = 0; l <= target_level; ++l) ++through[p->path[static_cast<std::size_t>(l)]];
    ++report.counts[p->path[static_cast<std::size_t>(target_level)]];
  }
  if (report.n_samples == 0) return report;
  const std::uint64_t completed = report.n_samples - report.abandoned;
  for (int l = 0; l <= target_level; ++l) {
    for (const Vertex& v : t.level(l)) {
      ConeComparison row;
      row.id = v.id;
      row.omega = m.at(v.id);
      auto it = through.find(v.id);
      row.count = it == through.end() ? 0 : it->second;
      row.empirical = completed ? static_cast<double>(row.count) / static_cast<double>(completed) : 0.0;
      const double w = to_double(row.omega);
      row.freq_error = std::abs(row.empirical - w);
      row.band = binomial_band(w, completed);
      row.flag = completed > 0 && row.freq_error > row.band + 1e-12;
      report.rows.push_back(row);
    }
  }
  return report;
}

SampleReport empirical_cone_measure(const TreeWithDynamics& t, const MeasureAssignment& m, const WalkConfig& cfg,
                                    std::uint64_t n_samples) {
  const Walker walker(t, m, cfg.target_level);
  std::vector<std::optional<EndPrefix>> prefixes;
  prefixes.reserve(n_samples);
  for (std::uint64_t i = 0; i < n_samples; ++i) prefixes.push_back(walker.sample(cfg, i));
  return compare_prefixes(t, m, prefixes, cfg.target_level, cfg.seed);
}

std::string sample_csv(const SampleReport& report) {
  std::ostringstream out;
  out.precision(10);
  out << "level,index,omega,empirical,freq_error,flag\n";
  for (const ConeComparison& r : report.rows) {
    out << r.id.level << ',' << r.id.index << ',' << to_double(r.omega) << ',' << r.empirical << ','
        << r.freq_error << ',' << (r.flag ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace juliaflow
