#pragma once

#include <vector>

#include "bperc/engine.hpp"
#include "bperc/lattice.hpp"
#include "bperc/rng.hpp"

namespace bperc::testutil {

inline Configuration config_from_sites(std::vector<Coord> dims, const std::vector<Site>& sites,
                                       Geometry geometry = Geometry::cube) {
  Configuration config(std::move(dims), geometry);
  for (const Site& s : sites) config.infect(s);
  return config;
}

inline NeighborhoodSpec random_spec(SplitMix64& rng, int d, int max_a,
                                    bool exclude_supercritical = false) {
  std::vector<int> a(static_cast<std::size_t>(d));
  int prev = 1;
  int sum = 0;
  for (int j = 0; j < d; ++j) {
    prev = prev + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_a - prev + 1));
    a[static_cast<std::size_t>(j)] = prev;
    sum += prev;
  }
  const int lo = exclude_supercritical ? a.back() + 1 : 1;
  const int r = lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(2 * sum - lo + 1));
  return NeighborhoodSpec(a, r);
}

inline Configuration random_config(SplitMix64& rng, std::vector<Coord> dims, double p,
                                   Geometry geometry = Geometry::cube) {
  Configuration config(std::move(dims), geometry);
  for (std::size_t idx = 0; idx < config.volume(); ++idx)
    if (rng.next_unit() < p) config.infect(idx);
  return config;
}

}  // namespace bperc::testutil
