#include "bperc/grid_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace bperc {

namespace {

long long read_int(std::istream& in, const char* what) {
  long long value;
  if (!(in >> value)) throw std::runtime_error(std::string("grid file: expected ") + what);
  return value;
}

}  // namespace

GridFile read_grid(std::istream& in) {
  const long long d = read_int(in, "dimension");
  if (d < 1 || d > 16) throw std::runtime_error("grid file: dimension out of range");
  std::vector<Coord> dims;
  for (long long j = 0; j < d; ++j) dims.push_back(read_int(in, "sidelength"));
  std::string geometry_token;
  if (!(in >> geometry_token)) throw std::runtime_error("grid file: expected geometry");
  const Geometry geometry = geometry_from_string(geometry_token);

  std::vector<int> a;
  for (long long j = 0; j < d; ++j) a.push_back(static_cast<int>(read_int(in, "exponent")));
  const int r = static_cast<int>(read_int(in, "threshold"));

  GridFile grid{NeighborhoodSpec(a, r), Configuration(dims, geometry)};

  Site site(static_cast<std::size_t>(d));
  while (true) {
    long long first;
    if (!(in >> first)) {
      if (in.eof()) break;
      throw std::runtime_error("grid file: malformed coordinate");
    }
    site[0] = first;
    for (long long j = 1; j < d; ++j) site[static_cast<std::size_t>(j)] = read_int(in, "coordinate");
    if (!grid.config.contains(site))
      throw std::runtime_error("grid file: infected site outside the domain");
    grid.config.infect(site);
  }
  return grid;
}

GridFile read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid file: " + path);
  return read_grid(in);
}

void write_grid(std::ostream& out, const NeighborhoodSpec& spec, const Configuration& config) {
  if (spec.d != config.dimension())
    throw std::invalid_argument("grid file: spec and configuration dimension mismatch");
  out << spec.d;
  for (Coord L : config.dims()) out << ' ' << L;
  out << ' ' << to_string(config.geometry()) << '\n';
  for (int j = 0; j < spec.d; ++j) out << spec.a[static_cast<std::size_t>(j)] << ' ';
  out << spec.r << '\n';
  for (const Site& s : config.infected_sites()) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j) out << ' ';
      out << s[j];
    }
    out << '\n';
  }
}

void write_grid_file(const std::string& path, const NeighborhoodSpec& spec,
                     const Configuration& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid file: " + path);
  write_grid(out, spec, config);
}

std::string grid_to_string(const NeighborhoodSpec& spec, const Configuration& config) {
  std::ostringstream out;
  write_grid(out, spec, config);
  return out.str();
}

}  // namespace bperc
