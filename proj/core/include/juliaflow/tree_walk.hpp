#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "juliaflow/harmonic_measure.hpp"
#include "juliaflow/tree.hpp"

namespace juliaflow {

enum class WalkMode { NearestNeighbor, LoopErased };

WalkMode parse_walk_mode(const std::string& s);
std::string to_string(WalkMode mode);

struct WalkConfig {
  std::uint64_t seed = 0;
  WalkMode mode = WalkMode::LoopErased;
  int target_level = 1;
  int max_steps = 10000;
};

using StepDistribution = std::vector<std::pair<VertexId, Rational>>;

// Transition law out of `a`; the probabilities sum to exactly 1.
StepDistribution step_distribution(const TreeWithDynamics& t, const MeasureAssignment& m, const VertexId& a,
                                   WalkMode mode);

// Precomputed floating-point transition tables for fast sampling.
class Walker {
 public:
  Walker(const TreeWithDynamics& t, const MeasureAssignment& m, int target_level);

  // Prefix x_0..x_target of the sampled end, or nullopt when abandoned.
  std::optional<EndPrefix> sample(const WalkConfig& cfg, std::uint64_t index) const;

 private:
  struct Row {
    std::vector<VertexId> children;
    std::vector<double> cumulative;  // over children, normalized to 1
  };
  const Row& row(const VertexId& v) const;

  const TreeWithDynamics* tree_;
  int target_level_;
  std::map<int, std::vector<Row>> rows_;
};

std::optional<EndPrefix> sample_end(const TreeWithDynamics& t, const MeasureAssignment& m, const WalkConfig& cfg,
                                    std::uint64_t index);

struct ConeComparison {
  VertexId id;
  Rational omega;
  std::uint64_t count = 0;
  double empirical = 0.0;
  double freq_error = 0.0;
  double band = 0.0;  // 4 sqrt(Omega (1 - Omega) / n)
  bool flag = false;
};

struct SampleReport {
  std::map<VertexId, std::uint64_t> counts;  // hits at the target level
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t abandoned = 0;
  std::vector<ConeComparison> rows;  // every vertex at levels 0..target
  bool any_flag() const;
};

// Per-level hit counts from a list of prefixes, compared against Omega.
SampleReport compare_prefixes(const TreeWithDynamics& t, const MeasureAssignment& m,
                              const std::vector<std::optional<EndPrefix>>& prefixes, int target_level,
                              std::uint64_t seed);

SampleReport empirical_cone_measure(const TreeWithDynamics& t, const MeasureAssignment& m, const WalkConfig& cfg,
                                    std::uint64_t n_samples);

double binomial_band(double p, std::uint64_t n, double sigmas = 4.0);

std::string sample_csv(const SampleReport& report);

}  // namespace juliaflow
