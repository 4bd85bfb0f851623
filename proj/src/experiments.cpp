#include "bperc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "bperc/engine.hpp"
#include "bperc/spanning.hpp"

namespace bperc {

namespace {

// Runs fn(t) once for every trial index; results land in caller-owned storage
// indexed by t, so aggregation is independent of the thread schedule.
void run_trials(std::uint64_t trials, unsigned threads,
                const std::function<void(std::uint64_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || trials < 2) {
    for (std::uint64_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t t = w; t < trials; t += threads) fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void check_probability(double p, bool allow_one) {
  if (!(p > 0.0) || p > 1.0 || (!allow_one && p == 1.0))
    throw std::invalid_argument("probability p out of range");
}

TrialEstimate estimate_from_indicators(const std::vector<std::uint8_t>& hit,
                                       std::uint64_t seed) {
  std::uint64_t successes = 0;
  for (std::uint8_t h : hit) successes += h;
  TrialEstimate est;
  est.trials = hit.size();
  est.estimate = static_cast<double>(successes) / static_cast<double>(hit.size());
  const auto ci = wilson_interval(successes, hit.size());
  est.ci_low = ci.low;
  est.ci_high = ci.high;
  est.seed = seed;
  return est;
}

}  // namespace

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("Wilson interval needs trials >= 1");
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2n = z * z / n;
  const double center = (phat + z2n / 2.0) / (1.0 + z2n);
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n)) / (1.0 + z2n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void sample_bernoulli(Configuration& config, double p, SplitMix64& rng) {
  const std::size_t volume = config.volume();
  for (std::size_t idx = 0; idx < volume; ++idx)
    if (rng.next_unit() < p) config.infect(idx);
}

TrialEstimate percolation_probability(const NeighborhoodSpec& spec, Coord L, double p,
                                      std::uint64_t trials, std::uint64_t seed,
                                      Geometry geometry, unsigned threads) {
  check_probability(p, true);
  if (L < 1) throw std::invalid_argument("domain needs L >= 1");
  if (trials < 1) throw std::invalid_argument("need trials >= 1");
  const UpdateFamily family = make_nr_family(spec);
  const std::vector<Coord> dims(static_cast<std::size_t>(spec.d), L);
  std::vector<std::uint8_t> hit(trials, 0);
  run_trials(trials, threads, [&](std::uint64_t t) {
    SplitMix64 rng = trial_stream(seed, t);
    Configuration config(dims, geometry);
    sample_bernoulli(config, p, rng);
    hit[t] = percolates(config, family) ? 1 : 0;
  });
  return estimate_from_indicators(hit, seed);
}

namespace {

ProbeRecord probe_length(const NeighborhoodSpec& spec, const UpdateFamily& family, Coord L,
                         double p, std::uint64_t budget, std::uint64_t probe_seed,
                         Geometry geometry, unsigned threads) {
  const std::vector<Coord> dims(static_cast<std::size_t>(spec.d), L);
  std::vector<std::uint8_t> hit;
  hit.reserve(budget);
  std::uint64_t total = 0;
  std::uint64_t successes = 0;
  std::uint64_t batch = std::min<std::uint64_t>(budget, 64);
  bool resolved = false;
  WilsonInterval ci{0.0, 1.0};
  while (true) {
    const std::uint64_t n = std::min(batch, budget - total);
    hit.resize(total + n);
    run_trials(n, threads, [&](std::uint64_t i) {
      const std::uint64_t t = total + i;
      SplitMix64 rng = trial_stream(probe_seed, t);
      Configuration config(dims, geometry);
      sample_bernoulli(config, p, rng);
      hit[t] = percolates(config, family) ? 1 : 0;
    });
    for (std::uint64_t i = total; i < total + n; ++i) successes += hit[i];
    total += n;
    ci = wilson_interval(successes, total);
    resolved = ci.low > 0.5 || ci.high < 0.5;
    if (resolved || total >= budget) break;
    batch *= 2;
  }
  ProbeRecord rec;
  rec.length = L;
  rec.estimate.estimate = static_cast<double>(successes) / static_cast<double>(total);
  rec.estimate.ci_low = ci.low;
  rec.estimate.ci_high = ci.high;
  rec.estimate.trials = total;
  rec.estimate.seed = probe_seed;
  rec.resolved = resolved;
  return rec;
}

}  // namespace

CriticalLengthResult critical_length(const NeighborhoodSpec& spec, double p,
                                     std::uint64_t trials_per_probe, std::uint64_t seed,
                                     Geometry geometry, Coord max_length, unsigned threads) {
  check_probability(p, false);
  if (trials_per_probe < 1) throw std::invalid_argument("need trials_per_probe >= 1");
  const UpdateFamily family = make_nr_family(spec);
  CriticalLengthResult result;
  result.seed = seed;

  const auto probe = [&](Coord L) -> const ProbeRecord& {
    const std::uint64_t probe_seed = derive_seed(seed, static_cast<std::uint64_t>(L));
    result.probes.push_back(
        probe_length(spec, family, L, p, trials_per_probe, probe_seed, geometry, threads));
    return result.probes.back();
  };
  const auto above = [](const ProbeRecord& rec) { return rec.estimate.estimate >= 0.5; };

  Coord lo = 0;  // largest length probed below 1/2 (0 = none)
  Coord hi = 0;  // smallest length probed at/above 1/2 (0 = none yet)
  for (Coord L = 1; hi == 0; L *= 2) {
    if (L > max_length)
      throw std::runtime_error("critical length exceeds the max length cap at p=" +
                               std::to_string(p));
    if (above(probe(L)))
      hi = L;
    else
      lo = L;
  }
  while (hi - lo > 1) {
    const Coord mid = lo + (hi - lo) / 2;
    if (above(probe(mid)))
      hi = mid;
    else
      lo = mid;
  }

  result.lc = hi;
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  for (const auto& rec : result.probes) result.resolved = result.resolved && rec.resolved;
  for (const auto& ra : result.probes)
    for (const auto& rb : result.probes)
      if (ra.length < rb.length && above(ra) && !above(rb)) result.monotone = false;
  return result;
}

ClusterStats center_cluster_stats(const NeighborhoodSpec& spec, Coord N, double p,
                                  double cutoff, std::uint64_t trials, std::uint64_t seed,
                                  unsigned threads, Coord cluster_graph_radius) {
  check_probability(p, true);
  if (N < 2) throw std::invalid_argument("center cluster needs N >= 2");
  if (trials < 1) throw std::invalid_argument("need trials >= 1");
  const UpdateFamily family = make_nr_family(spec);
  const std::vector<Coord> dims(static_cast<std::size_t>(spec.d), N);
  const Site center(static_cast<std::size_t>(spec.d), N / 2);
  const StrongGraphParam param(cluster_graph_radius != 0 ? cluster_graph_radius
                                                         : 2 * spec.max_exponent());
  std::vector<double> sizes(trials, 0.0);
  std::vector<std::uint8_t> tail(trials, 0);
  run_trials(trials, threads, [&](std::uint64_t t) {
    SplitMix64 rng = trial_stream(seed, t);
    Configuration config(dims, Geometry::cube);
    sample_bernoulli(config, p, rng);
    const Configuration closed = closure(config, family);
    const auto comp = component_at(closed, center, param);
    const double size = comp ? static_cast<double>(comp->size) : 0.0;
    const double dia = comp ? static_cast<double>(comp->bbox.long_side()) : 0.0;
    sizes[t] = size;
    tail[t] = dia >= cutoff ? 1 : 0;
  });
  ClusterStats stats;
  stats.cutoff = cutoff;
  stats.trials = trials;
  stats.seed = seed;
  double sum = 0.0;
  for (double s : sizes) sum += s;
  stats.mean_size = sum / static_cast<double>(trials);
  std::uint64_t hits = 0;
  for (std::uint8_t h : tail) hits += h;
  stats.diam_tail = static_cast<double>(hits) / static_cast<double>(trials);
  return stats;
}

TrialEstimate diam_tail_probability(const NeighborhoodSpec& spec, Coord L, double p,
                                    Coord threshold, std::uint64_t trials, std::uint64_t seed,
                                    unsigned threads) {
  check_probability(p, true);
  if (threshold < 1) throw std::invalid_argument("diameter threshold must be >= 1");
  if (trials < 1) throw std::invalid_argument("need trials >= 1");
  const UpdateFamily family = make_nr_family(spec);
  const std::vector<Coord> dims(static_cast<std::size_t>(spec.d), L);
  const StrongGraphParam param(2 * spec.max_exponent());
  std::vector<std::uint8_t> hit(trials, 0);
  run_trials(trials, threads, [&](std::uint64_t t) {
    SplitMix64 rng = trial_stream(seed, t);
    Configuration config(dims, Geometry::cube);
    sample_bernoulli(config, p, rng);
    hit[t] = diam(closure(config, family), param) >= threshold ? 1 : 0;
  });
  return estimate_from_indicators(hit, seed);
}

TrialEstimate seeded_growth(const NeighborhoodSpec& spec, Coord L,
                            const std::vector<Coord>& seed_block_dims, double p,
                            std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  check_probability(p, true);
  if (trials < 1) throw std::invalid_argument("need trials >= 1");
  if (static_cast<int>(seed_block_dims.size()) != spec.d)
    throw std::invalid_argument("seed block dimension mismatch");
  for (Coord s : seed_block_dims)
    if (s < 1 || s > L) throw std::invalid_argument("seed block larger than domain");
  const UpdateFamily family = make_nr_family(spec);
  const std::vector<Coord> dims(static_cast<std::size_t>(spec.d), L);
  Site lo(static_cast<std::size_t>(spec.d), 1);
  Site hi(seed_block_dims.begin(), seed_block_dims.end());
  const Block seed_block(std::move(lo), std::move(hi));
  std::vector<std::uint8_t> hit(trials, 0);
  run_trials(trials, threads, [&](std::uint64_t t) {
    SplitMix64 rng = trial_stream(seed, t);
    Configuration config(dims, Geometry::cube);
    sample_bernoulli(config, p, rng);
    // deterministic seed block on top of the sampled field
    Site cur = seed_block.lo;
    while (true) {
      config.infect(cur);
      int j = seed_block.dimension() - 1;
      while (j >= 0 &&
             cur[static_cast<std::size_t>(j)] == seed_block.hi[static_cast<std::size_t>(j)]) {
        cur[static_cast<std::size_t>(j)] = seed_block.lo[static_cast<std::size_t>(j)];
        --j;
      }
      if (j < 0) break;
      ++cur[static_cast<std::size_t>(j)];
    }
    hit[t] = percolates(config, family) ? 1 : 0;
  });
  return estimate_from_indicators(hit, seed);
}

double lambda_value(double p, int i, int a1, int a2) {
  check_probability(p, false);
  if (i < 1) throw std::invalid_argument("lambda index i must be >= 1");
  if (a1 < 1 || a2 < a1) throw std::invalid_argument("need 1 <= a1 <= a2");
  const double base = std::pow(p, -static_cast<double>(i));
  if (a2 == a1) return base;
  const double lg = std::log(p);
  return base * lg * lg;
}

double exp_iter(int k, double x) {
  if (k < 0) throw std::invalid_argument("iteration count must be >= 0");
  for (int t = 0; t < k; ++t) x = std::exp(x);
  return x;
}

double log_iter(int k, double x) {
  if (k < 0) throw std::invalid_argument("iteration count must be >= 0");
  for (int t = 0; t < k; ++t) {
    if (!(x > 0.0))
      throw std::runtime_error("iterated log hit a nonpositive intermediate value");
    x = std::log(x);
  }
  return x;
}

FitResult scaling_fit(const std::vector<ScalingPoint>& points, FitModel model) {
  if (points.size() < 3) throw std::invalid_argument("scaling fit needs at least 3 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    check_probability(points[i].p, false);
    if (points[i].lc < 2)
      throw std::invalid_argument("scaling fit needs lc >= 2 (log log undefined)");
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i].p == points[j].p)
        throw std::invalid_argument("scaling fit needs distinct p values");
  }
  FitResult fit;
  fit.model = model;
  fit.n = points.size();
  const double n = static_cast<double>(points.size());
  if (model == FitModel::pure_power) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs(points.size()), ys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      xs[i] = std::log(1.0 / points[i].p);
      ys[i] = std::log(std::log(static_cast<double>(points[i].lc)));
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0) throw std::invalid_argument("degenerate abscissae in scaling fit");
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.exponent * sx) / n;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
      fit.residuals.push_back(r);
      fit.rss += r * r;
    }
    return fit;
  }
  // power_log2: y = log lc against lambda, slope through the origin
  double sll = 0, sly = 0;
  std::vector<double> ys(points.size());
  fit.ratio_min = fit.ratio_max = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].lambda > 0))
      throw std::invalid_argument("scaling fit needs lambda > 0");
    ys[i] = std::log(static_cast<double>(points[i].lc));
    const double ratio = ys[i] / points[i].lambda;
    if (i == 0) {
      fit.ratio_min = fit.ratio_max = ratio;
    } else {
      fit.ratio_min = std::min(fit.ratio_min, ratio);
      fit.ratio_max = std::max(fit.ratio_max, ratio);
    }
    sll += points[i].lambda * points[i].lambda;
    sly += points[i].lambda * ys[i];
  }
  fit.ratio_spread = fit.ratio_max / fit.ratio_min;
  fit.slope = sly / sll;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = ys[i] - fit.slope * points[i].lambda;
    fit.residuals.push_back(r);
    fit.rss += r * r;
  }
  return fit;
}

}  // namespace bperc
