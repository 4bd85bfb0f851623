#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bperc {

using Coord = std::int64_t;
using Site = std::vector<Coord>;    // 1-based lattice coordinates, one entry per axis
using Offset = std::vector<Coord>;  // relative displacement, entries may be negative

enum class Geometry { cube, torus };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

/// The anisotropic neighborhood family N_r^{a_1,...,a_d}: along each axis j
/// the a_j nearest sites in both directions, infection threshold r.
struct NeighborhoodSpec {
  int d;
  std::vector<int> a;  // positive, nondecreasing
  int r;               // 1 <= r <= 2*sum(a)

  NeighborhoodSpec(std::vector<int> exponents, int threshold);

  int neighborhood_size() const;  // 2*sum(a)
  int sum_exponents() const;
  int max_exponent() const { return a.back(); }
  std::string family_name() const;  // e.g. "N3^1-2"
};

/// Axis-aligned rectangular block with inclusive corners. Sidelengths count
/// lattice sites, so a single site has every side equal to 1.
struct Block {
  Site lo;
  Site hi;

  Block(Site lo_corner, Site hi_corner);

  int dimension() const { return static_cast<int>(lo.size()); }
  Coord side(int axis) const { return hi[axis] - lo[axis] + 1; }
  Coord long_side() const;
  std::uint64_t volume() const;
  bool contains(const Site& s) const;
  bool contains(const Block& b) const;

  bool operator==(const Block&) const = default;
};

/// Smallest block containing every site of `sites`. Throws on empty input.
Block bounding_block(const std::vector<Site>& sites);

/// Largest sidelength of the bounding block of `sites`. Throws on empty input.
Coord long_side(const std::vector<Site>& sites);

/// Offsets {+-e_j, +-2e_j, ..., +-a_j e_j : j in [d]} in canonical order:
/// axis-major, within an axis sorted by signed magnitude. Size 2*sum(a).
std::vector<Offset> neighborhood_offsets(const NeighborhoodSpec& spec);

/// Infection state over a d-dimensional box, one bit per site. Cube geometry
/// treats out-of-range neighbors as permanently healthy; torus wraps.
class Configuration {
 public:
  explicit Configuration(std::vector<Coord> dims, Geometry geometry = Geometry::cube);

  int dimension() const { return static_cast<int>(dims_.size()); }
  const std::vector<Coord>& dims() const { return dims_; }
  Geometry geometry() const { return geometry_; }
  std::size_t volume() const { return volume_; }
  std::size_t infected_count() const { return infected_count_; }
  bool full() const { return infected_count_ == volume_; }
  bool empty() const { return infected_count_ == 0; }

  // Flat index layout: last axis fastest. Coordinates are 1-based.
  std::size_t index_of(const Site& s) const;
  Site site_of(std::size_t idx) const;
  bool contains(const Site& s) const;
  const std::vector<std::size_t>& strides() const { return strides_; }

  bool infected(std::size_t idx) const {
    return (words_[idx >> 6] >> (idx & 63)) & 1u;
  }
  bool infected(const Site& s) const { return infected(index_of(s)); }

  void infect(std::size_t idx) {
    std::uint64_t& w = words_[idx >> 6];
    const std::uint64_t bit = std::uint64_t(1) << (idx & 63);
    infected_count_ += !(w & bit);
    w |= bit;
  }
  void infect(const Site& s) { infect(index_of(s)); }

  void clear();

  std::vector<Site> infected_sites() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

  bool operator==(const Configuration& other) const;

 private:
  std::vector<Coord> dims_;
  Geometry geometry_;
  std::size_t volume_;
  std::size_t infected_count_;
  std::vector<std::size_t> strides_;
  std::vector<std::uint64_t> words_;
};

}  // namespace bperc
