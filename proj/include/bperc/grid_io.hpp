#pragma once

#include <iosfwd>
#include <string>

#include "bperc/lattice.hpp"

namespace bperc {

/// Text grid format:
///   line 1: d L1 ... Ld geometry
///   line 2: a1 ... ad r
///   then one infected site per line, d space-separated 1-based integers.
/// Parsing is whitespace-tolerant and order-insensitive; the writer emits the
/// canonical form (single spaces, sites sorted lexicographically).
struct GridFile {
  NeighborhoodSpec spec;
  Configuration config;
};

GridFile read_grid(std::istream& in);
GridFile read_grid_file(const std::string& path);

void write_grid(std::ostream& out, const NeighborhoodSpec& spec, const Configuration& config);
void write_grid_file(const std::string& path, const NeighborhoodSpec& spec,
                     const Configuration& config);

std::string grid_to_string(const NeighborhoodSpec& spec, const Configuration& config);

}  // namespace bperc
