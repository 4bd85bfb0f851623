#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bperc/lattice.hpp"
#include "bperc/rng.hpp"

namespace bperc {

struct TrialEstimate {
  double estimate = 0.0;
  double ci_low = 0.0;   // Wilson 95% interval
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string stream_rule = kStreamRuleId;
};

struct WilsonInterval {
  double low, high;
};
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials);

/// One Bernoulli(p) draw per site in flat index order; exactly one draw per
/// site regardless of outcome, so fields at different p couple monotonically
/// on a shared stream.
void sample_bernoulli(Configuration& config, double p, SplitMix64& rng);

/// Fraction of trials whose sample percolates on [L]^d.
TrialEstimate percolation_probability(const NeighborhoodSpec& spec, Coord L, double p,
                                      std::uint64_t trials, std::uint64_t seed,
                                      Geometry geometry = Geometry::cube,
                                      unsigned threads = 0);

struct ProbeRecord {
  Coord length;
  TrialEstimate estimate;
  bool resolved;  // CI excluded 1/2 within the trial budget
};

struct CriticalLengthResult {
  Coord lc = 0;
  Coord bracket_lo = 0;  // estimate below 1/2 here (0 when lc == 1)
  Coord bracket_hi = 0;  // first length with estimate >= 1/2
  bool resolved = true;
  bool monotone = true;  // no contradictory probe decisions observed
  std::vector<ProbeRecord> probes;
  std::uint64_t seed = 0;
};

/// Exponential doubling to bracket the first L with estimated percolation
/// probability >= 1/2, then bisection. Each probe runs a sequential test:
/// trials grow until the Wilson CI excludes 1/2 or the budget is hit.
CriticalLengthResult critical_length(const NeighborhoodSpec& spec, double p,
                                     std::uint64_t trials_per_probe, std::uint64_t seed,
                                     Geometry geometry = Geometry::cube,
                                     Coord max_length = 16384, unsigned threads = 0);

struct ClusterStats {
  double mean_size = 0.0;
  double diam_tail = 0.0;  // empirical P(diam K >= cutoff)
  double cutoff = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Strong component of the center site (floor(N/2), ...) in the closure on
/// [N]^d; the empty component (healthy center) contributes size 0, diam 0.
/// cluster_graph_radius is the linf adjacency radius of the cluster graph;
/// 0 selects the strong-graph default 2*a_d.
ClusterStats center_cluster_stats(const NeighborhoodSpec& spec, Coord N, double p,
                                  double cutoff, std::uint64_t trials, std::uint64_t seed,
                                  unsigned threads = 0, Coord cluster_graph_radius = 0);

/// Empirical P(diam(closure(A)) >= threshold) with the 2*a_d strong graph.
TrialEstimate diam_tail_probability(const NeighborhoodSpec& spec, Coord L, double p,
                                    Coord threshold, std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads = 0);

/// Deterministic seed block at the lower corner plus Bernoulli(p) noise;
/// fraction of trials where the closure fills [L]^d.
TrialEstimate seeded_growth(const NeighborhoodSpec& spec, Coord L,
                            const std::vector<Coord>& seed_block_dims, double p,
                            std::uint64_t trials, std::uint64_t seed, unsigned threads = 0);

/// lambda_i(p) = p^-i when a2 == a1, p^-i (log p)^2 when a2 > a1.
double lambda_value(double p, int i, int a1, int a2);

/// k-fold iterated exponential and its partial inverse.
double exp_iter(int k, double x);
double log_iter(int k, double x);  // throws on a nonpositive intermediate

struct ScalingPoint {
  double p;
  Coord lc;
  double lambda;  // lambda_i(p)
};

enum class FitModel { pure_power, power_log2 };

struct FitResult {
  FitModel model;
  std::size_t n = 0;
  // pure_power: least-squares fit of log log lc against log(1/p)
  double exponent = 0.0;
  double intercept = 0.0;
  // power_log2: ratios log lc / lambda and a through-origin slope
  double slope = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double ratio_spread = 0.0;
  std::vector<double> residuals;
  double rss = 0.0;
};

FitResult scaling_fit(const std::vector<ScalingPoint>& points, FitModel model);

}  // namespace bperc
