#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bperc/engine.hpp"
#include "bperc/lattice.hpp"

namespace bperc {

/// Adjacency radius of the strong graph G: sites u, v are adjacent when
/// ||u - v||_inf <= threshold. The d-process uses 2*a_d, the (d-1)-process
/// 2*a_{d-1}. Spanning analysis treats coordinates as plain integers (no
/// torus wrap): the strong graph lives on the box.
struct StrongGraphParam {
  Coord threshold;
  explicit StrongGraphParam(Coord t);
};

/// Partition of `sites` into maximal strongly connected subsets, ordered by
/// minimal site (lexicographic); sites within a component are sorted.
std::vector<std::vector<Site>> strong_components(std::vector<Site> sites,
                                                 StrongGraphParam param);

/// Max of long_side over the strong components (0 for the empty set).
Coord diam(const std::vector<Site>& sites, StrongGraphParam param);
/// Same, over the infected sites of a configuration.
Coord diam(const Configuration& config, StrongGraphParam param);

/// Strongly connected component of `site` in the infected set of `config`,
/// as (size, bounding block); nullopt when the site is healthy.
struct GridComponent {
  std::uint64_t size;
  Block bbox;
};
std::optional<GridComponent> component_at(const Configuration& config, const Site& site,
                                          StrongGraphParam param);

/// Event I*(R): the closure of the infected sites of R, run with R as its own
/// cube domain, covers R.
bool is_internally_filled(const Block& R, const Configuration& config,
                          const UpdateFamily& family);

/// Event Ix(R): some strong component of that closure has R as its exact
/// bounding block.
bool is_internally_spanned(const Block& R, const Configuration& config,
                           const UpdateFamily& family, StrongGraphParam param);

struct ComponentCollection {
  std::vector<std::vector<Site>> sets;  // pairwise disjoint, each nonempty
};

enum class MergePolicy { canonical, randomized };

/// Full history of the components process: initial singletons in canonical
/// order, then one entry per merge (the closure of the merged union, taken in
/// the ambient domain).
struct ProcessTrace {
  struct Entry {
    std::vector<Site> sites;  // sorted
    Block block;
    Coord diameter;  // long side of block; entries are strongly connected
    int parent_a = -1;
    int parent_b = -1;  // history indices, -1 for initial singletons
  };
  std::vector<Entry> history;
  std::vector<int> final_entries;  // surviving sets, by history index

  /// diam of the closure: max entry diameter among surviving sets.
  Coord closure_diameter() const;
};

ProcessTrace components_process_trace(const Configuration& config, const UpdateFamily& family,
                                      StrongGraphParam param,
                                      MergePolicy policy = MergePolicy::canonical,
                                      std::uint64_t policy_seed = 0);

/// Runs the process to termination; the union of the returned sets equals the
/// closure of the infected set. Rejects supercritical N_r families.
ComponentCollection components_process(const Configuration& config, const UpdateFamily& family,
                                       StrongGraphParam param);

/// Bounding block of the first set in the process whose diameter reaches k;
/// guaranteed internally spanned with k <= diam <= threshold*k.
Block al_witness_block(const ProcessTrace& trace, Coord k);
Block al_witness_block(const Configuration& config, const UpdateFamily& family,
                       StrongGraphParam param, Coord k);

/// Slab witness: first set whose bounding block W x [h] (W over all axes but
/// the last, h along the last axis) reaches long(W) >= l or h >= k.
struct SlabWitness {
  Block block;
  Coord base_diam;  // long side of W
  Coord height;     // h
};
SlabWitness al_witness_slab(const ProcessTrace& trace, Coord l, Coord k);
SlabWitness al_witness_slab(const Configuration& config, const UpdateFamily& family,
                            StrongGraphParam param, Coord l, Coord k);

}  // namespace bperc
