#include "bperc/lattice.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace bperc {

std::string to_string(Geometry g) {
  return g == Geometry::cube ? "cube" : "torus";
}

Geometry geometry_from_string(const std::string& s) {
  if (s == "cube") return Geometry::cube;
  if (s == "torus") return Geometry::torus;
  throw std::invalid_argument("unknown geometry '" + s + "' (expected cube or torus)");
}

NeighborhoodSpec::NeighborhoodSpec(std::vector<int> exponents, int threshold)
    : d(static_cast<int>(exponents.size())), a(std::move(exponents)), r(threshold) {
  if (d < 1) throw std::invalid_argument("neighborhood needs dimension >= 1");
  int sum = 0;
  for (int j = 0; j < d; ++j) {
    if (a[j] < 1) throw std::invalid_argument("neighborhood exponents must be positive");
    if (j > 0 && a[j] < a[j - 1])
      throw std::invalid_argument("neighborhood exponents must be nondecreasing");
    if (sum > (1 << 20)) throw std::invalid_argument("neighborhood too large");
    sum += a[j];
  }
  if (r < 1 || r > 2 * sum)
    throw std::invalid_argument("threshold r must satisfy 1 <= r <= 2*sum(a)");
}

int NeighborhoodSpec::sum_exponents() const {
  int sum = 0;
  for (int aj : a) sum += aj;
  return sum;
}

int NeighborhoodSpec::neighborhood_size() const { return 2 * sum_exponents(); }

std::string NeighborhoodSpec::family_name() const {
  std::string name = "N" + std::to_string(r) + "^";
  for (int j = 0; j < d; ++j) {
    if (j) name += '-';
    name += std::to_string(a[j]);
  }
  return name;
}

Block::Block(Site lo_corner, Site hi_corner) : lo(std::move(lo_corner)), hi(std::move(hi_corner)) {
  if (lo.empty() || lo.size() != hi.size())
    throw std::invalid_argument("block corners must be nonempty and of equal dimension");
  for (std::size_t j = 0; j < lo.size(); ++j)
    if (lo[j] > hi[j]) throw std::invalid_argument("block requires lo <= hi coordinatewise");
}

Coord Block::long_side() const {
  Coord best = 0;
  for (int j = 0; j < dimension(); ++j) best = std::max(best, side(j));
  return best;
}

std::uint64_t Block::volume() const {
  std::uint64_t v = 1;
  for (int j = 0; j < dimension(); ++j) v *= static_cast<std::uint64_t>(side(j));
  return v;
}

bool Block::contains(const Site& s) const {
  if (s.size() != lo.size()) return false;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (s[j] < lo[j] || s[j] > hi[j]) return false;
  return true;
}

bool Block::contains(const Block& b) const { return contains(b.lo) && contains(b.hi); }

Block bounding_block(const std::vector<Site>& sites) {
  if (sites.empty()) throw std::invalid_argument("bounding block of an empty set is undefined");
  Site lo = sites.front();
  Site hi = sites.front();
  for (const Site& s : sites) {
    if (s.size() != lo.size()) throw std::invalid_argument("sites of mixed dimension");
    for (std::size_t j = 0; j < s.size(); ++j) {
      lo[j] = std::min(lo[j], s[j]);
      hi[j] = std::max(hi[j], s[j]);
    }
  }
  return Block(std::move(lo), std::move(hi));
}

Coord long_side(const std::vector<Site>& sites) { return bounding_block(sites).long_side(); }

std::vector<Offset> neighborhood_offsets(const NeighborhoodSpec& spec) {
  std::vector<Offset> offsets;
  offsets.reserve(static_cast<std::size_t>(spec.neighborhood_size()));
  for (int j = 0; j < spec.d; ++j) {
    for (Coord m = -spec.a[j]; m <= spec.a[j]; ++m) {
      if (m == 0) continue;
      Offset o(static_cast<std::size_t>(spec.d), 0);
      o[static_cast<std::size_t>(j)] = m;
      offsets.push_back(std::move(o));
    }
  }
  return offsets;
}

Configuration::Configuration(std::vector<Coord> dims, Geometry geometry)
    : dims_(std::move(dims)), geometry_(geometry), infected_count_(0) {
  if (dims_.empty()) throw std::invalid_argument("configuration needs dimension >= 1");
  std::size_t vol = 1;
  for (Coord L : dims_) {
    if (L < 1) throw std::invalid_argument("sidelengths must be positive");
    if (vol > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(L))
      throw std::invalid_argument("domain volume overflows");
    vol *= static_cast<std::size_t>(L);
  }
  volume_ = vol;
  strides_.assign(dims_.size(), 1);
  for (int j = static_cast<int>(dims_.size()) - 2; j >= 0; --j)
    strides_[static_cast<std::size_t>(j)] =
        strides_[static_cast<std::size_t>(j) + 1] * static_cast<std::size_t>(dims_[static_cast<std::size_t>(j) + 1]);
  words_.assign((volume_ + 63) / 64, 0);
}

std::size_t Configuration::index_of(const Site& s) const {
  if (s.size() != dims_.size()) throw std::invalid_argument("site dimension mismatch");
  std::size_t idx = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] < 1 || s[j] > dims_[j]) throw std::out_of_range("site outside domain");
    idx += static_cast<std::size_t>(s[j] - 1) * strides_[j];
  }
  return idx;
}

Site Configuration::site_of(std::size_t idx) const {
  Site s(dims_.size());
  for (std::size_t j = 0; j < dims_.size(); ++j) {
    s[j] = static_cast<Coord>(idx / strides_[j]) + 1;
    idx %= strides_[j];
  }
  return s;
}

bool Configuration::contains(const Site& s) const {
  if (s.size() != dims_.size()) return false;
  for (std::size_t j = 0; j < s.size(); ++j)
    if (s[j] < 1 || s[j] > dims_[j]) return false;
  return true;
}

void Configuration::clear() {
  std::fill(words_.begin(), words_.end(), 0);
  infected_count_ = 0;
}

std::vector<Site> Configuration::infected_sites() const {
  std::vector<Site> sites;
  sites.reserve(infected_count_);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word) {
      const int b = __builtin_ctzll(word);
      word &= word - 1;
      sites.push_back(site_of((w << 6) + static_cast<std::size_t>(b)));
    }
  }
  return sites;
}

bool Configuration::operator==(const Configuration& other) const {
  return dims_ == other.dims_ && geometry_ == other.geometry_ && words_ == other.words_;
}

}  // namespace bperc
