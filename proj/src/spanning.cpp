#include "bperc/spanning.hpp"

#include <algorithm>
#include <stdexcept>

#include "bperc/families.hpp"
#include "bperc/rng.hpp"

namespace bperc {

namespace {

Coord linf_distance(const Site& u, const Site& v) {
  Coord best = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const Coord diff = u[j] > v[j] ? u[j] - v[j] : v[j] - u[j];
    best = std::max(best, diff);
  }
  return best;
}

// Min over site pairs, with early exit at <= t.
bool sets_adjacent(const std::vector<Site>& a, const std::vector<Site>& b, Coord t) {
  for (const Site& u : a)
    for (const Site& v : b)
      if (linf_distance(u, v) <= t) return true;
  return false;
}

Coord block_gap(const Block& a, const Block& b) {
  Coord best = 0;
  for (int j = 0; j < a.dimension(); ++j) {
    Coord gap = 0;
    if (a.hi[static_cast<std::size_t>(j)] < b.lo[static_cast<std::size_t>(j)])
      gap = b.lo[static_cast<std::size_t>(j)] - a.hi[static_cast<std::size_t>(j)];
    else if (b.hi[static_cast<std::size_t>(j)] < a.lo[static_cast<std::size_t>(j)])
      gap = a.lo[static_cast<std::size_t>(j)] - b.hi[static_cast<std::size_t>(j)];
    best = std::max(best, gap);
  }
  return best;
}

std::vector<Offset> ball_offsets(int d, Coord t) {
  std::uint64_t count = 1;
  for (int j = 0; j < d; ++j) {
    count *= static_cast<std::uint64_t>(2 * t + 1);
    if (count > 2'000'000) throw std::invalid_argument("strong graph radius too large");
  }
  std::vector<Offset> out;
  out.reserve(count - 1);
  Offset cur(static_cast<std::size_t>(d), -t);
  while (true) {
    bool zero = true;
    for (Coord c : cur) zero = zero && c == 0;
    if (!zero) out.push_back(cur);
    int j = d - 1;
    while (j >= 0 && cur[static_cast<std::size_t>(j)] == t) {
      cur[static_cast<std::size_t>(j)] = -t;
      --j;
    }
    if (j < 0) break;
    ++cur[static_cast<std::size_t>(j)];
  }
  return out;
}

struct GridComponentScan {
  Block bbox;
  std::uint64_t size;
};

// BFS over the infected sites of the grid from `start`, box adjacency (no
// wrap). `visited` must be volume-sized; flags persist across calls.
GridComponentScan scan_component(const Configuration& config, std::size_t start,
                                 const std::vector<Offset>& ball,
                                 std::vector<std::uint8_t>& visited) {
  const auto& dims = config.dims();
  const auto& strides = config.strides();
  const int d = config.dimension();
  std::vector<std::size_t> stack{start};
  visited[start] = 1;
  Site lo = config.site_of(start);
  Site hi = lo;
  std::uint64_t size = 0;
  std::vector<Coord> coords(static_cast<std::size_t>(d));
  while (!stack.empty()) {
    const std::size_t idx = stack.back();
    stack.pop_back();
    ++size;
    std::size_t rem = idx;
    for (std::size_t j = 0; j < strides.size(); ++j) {
      coords[j] = static_cast<Coord>(rem / strides[j]) + 1;
      rem %= strides[j];
      lo[j] = std::min(lo[j], coords[j]);
      hi[j] = std::max(hi[j], coords[j]);
    }
    for (const Offset& o : ball) {
      std::ptrdiff_t nidx = static_cast<std::ptrdiff_t>(idx);
      bool ok = true;
      for (std::size_t j = 0; j < strides.size(); ++j) {
        const Coord c = coords[j] + o[j];
        if (c < 1 || c > dims[j]) {
          ok = false;
          break;
        }
        nidx += o[j] * static_cast<std::ptrdiff_t>(strides[j]);
      }
      if (!ok) continue;
      const std::size_t n = static_cast<std::size_t>(nidx);
      if (visited[n] || !config.infected(n)) continue;
      visited[n] = 1;
      stack.push_back(n);
    }
  }
  return {Block(std::move(lo), std::move(hi)), size};
}

void check_block_in_domain(const Block& R, const Configuration& config) {
  if (R.dimension() != config.dimension())
    throw std::invalid_argument("block dimension mismatch");
  for (int j = 0; j < R.dimension(); ++j) {
    const std::size_t js = static_cast<std::size_t>(j);
    if (R.lo[js] < 1 || R.hi[js] > config.dims()[js])
      throw std::invalid_argument("block out of domain bounds");
  }
}

// Closure of the infected sites of R with R as its own cube domain.
Configuration restricted_closure(const Block& R, const Configuration& config,
                                 const UpdateFamily& family) {
  std::vector<Coord> sub_dims(static_cast<std::size_t>(R.dimension()));
  for (int j = 0; j < R.dimension(); ++j)
    sub_dims[static_cast<std::size_t>(j)] = R.side(j);
  Configuration sub(std::move(sub_dims), Geometry::cube);
  Site cur = R.lo;
  while (true) {
    if (config.infected(cur)) {
      Site local(cur.size());
      for (std::size_t j = 0; j < cur.size(); ++j) local[j] = cur[j] - R.lo[j] + 1;
      sub.infect(local);
    }
    int j = R.dimension() - 1;
    while (j >= 0 && cur[static_cast<std::size_t>(j)] == R.hi[static_cast<std::size_t>(j)]) {
      cur[static_cast<std::size_t>(j)] = R.lo[static_cast<std::size_t>(j)];
      --j;
    }
    if (j < 0) break;
    ++cur[static_cast<std::size_t>(j)];
  }
  return closure(sub, family);
}

}  // namespace

StrongGraphParam::StrongGraphParam(Coord t) : threshold(t) {
  if (t < 1) throw std::invalid_argument("strong graph threshold must be >= 1");
}

std::vector<std::vector<Site>> strong_components(std::vector<Site> sites,
                                                 StrongGraphParam param) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  const std::size_t n = sites.size();
  if (n > 0) {
    const std::size_t d = sites.front().size();
    for (const Site& s : sites)
      if (s.size() != d) throw std::invalid_argument("sites of mixed dimension");
  }
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  const auto find = [&parent](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (linf_distance(sites[i], sites[j]) <= param.threshold) {
        const std::size_t ri = find(i), rj = find(j);
        if (ri != rj) parent[ri] = rj;
      }
  std::vector<std::vector<Site>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(sites[i]);
  std::vector<std::vector<Site>> out;
  for (auto& g : groups)
    if (!g.empty()) out.push_back(std::move(g));  // already sorted: sites were
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

Coord diam(const std::vector<Site>& sites, StrongGraphParam param) {
  Coord best = 0;
  for (const auto& comp : strong_components(sites, param))
    best = std::max(best, long_side(comp));
  return best;
}

Coord diam(const Configuration& config, StrongGraphParam param) {
  if (config.empty()) return 0;
  if (config.full()) {
    Coord best = 0;
    for (Coord L : config.dims()) best = std::max(best, L);
    return best;
  }
  const auto ball = ball_offsets(config.dimension(), param.threshold);
  std::vector<std::uint8_t> visited(config.volume(), 0);
  Coord best = 0;
  const auto& words = config.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t word = words[w];
    while (word) {
      const int b = __builtin_ctzll(word);
      word &= word - 1;
      const std::size_t idx = (w << 6) + static_cast<std::size_t>(b);
      if (visited[idx]) continue;
      const auto comp = scan_component(config, idx, ball, visited);
      best = std::max(best, comp.bbox.long_side());
    }
  }
  return best;
}

std::optional<GridComponent> component_at(const Configuration& config, const Site& site,
                                          StrongGraphParam param) {
  const std::size_t idx = config.index_of(site);
  if (!config.infected(idx)) return std::nullopt;
  if (config.full()) {  // one component, regardless of the radius
    Site lo(static_cast<std::size_t>(config.dimension()), 1);
    return GridComponent{config.volume(), Block(std::move(lo), Site(config.dims().begin(),
                                                                    config.dims().end()))};
  }
  const auto ball = ball_offsets(config.dimension(), param.threshold);
  std::vector<std::uint8_t> visited(config.volume(), 0);
  const auto comp = scan_component(config, idx, ball, visited);
  return GridComponent{comp.size, comp.bbox};
}

bool is_internally_filled(const Block& R, const Configuration& config,
                          const UpdateFamily& family) {
  check_block_in_domain(R, config);
  return restricted_closure(R, config, family).full();
}

bool is_internally_spanned(const Block& R, const Configuration& config,
                           const UpdateFamily& family, StrongGraphParam param) {
  check_block_in_domain(R, config);
  const Configuration closed = restricted_closure(R, config, family);
  if (closed.empty()) return false;
  const auto ball = ball_offsets(closed.dimension(), param.threshold);
  std::vector<std::uint8_t> visited(closed.volume(), 0);
  const auto& words = closed.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t word = words[w];
    while (word) {
      const int b = __builtin_ctzll(word);
      word &= word - 1;
      const std::size_t idx = (w << 6) + static_cast<std::size_t>(b);
      if (visited[idx]) continue;
      const auto comp = scan_component(closed, idx, ball, visited);
      bool spans = true;
      for (int j = 0; j < closed.dimension(); ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        spans = spans && comp.bbox.lo[js] == 1 && comp.bbox.hi[js] == closed.dims()[js];
      }
      if (spans) return true;
    }
  }
  return false;
}

Coord ProcessTrace::closure_diameter() const {
  Coord best = 0;
  for (int e : final_entries) best = std::max(best, history[static_cast<std::size_t>(e)].diameter);
  return best;
}

ProcessTrace components_process_trace(const Configuration& config, const UpdateFamily& family,
                                      StrongGraphParam param, MergePolicy policy,
                                      std::uint64_t policy_seed) {
  if (family.nr_spec() && classify_nr(*family.nr_spec()) == CriticalityLabel::supercritical)
    throw std::invalid_argument(
        "components process requires a non-supercritical family (r > a_d)");
  if (family.dimension() != config.dimension())
    throw std::invalid_argument("family and configuration dimension mismatch");

  ProcessTrace trace;
  for (const Site& s : config.infected_sites())
    trace.history.push_back(ProcessTrace::Entry{{s}, Block(s, s), 1, -1, -1});
  std::vector<int> active(trace.history.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);

  SplitMix64 rng(policy_seed);
  while (true) {
    // candidate pairs: active sets whose union is strongly connected
    std::vector<std::pair<int, int>> candidates;
    for (std::size_t x = 0; x < active.size(); ++x) {
      const auto& ex = trace.history[static_cast<std::size_t>(active[x])];
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const auto& ey = trace.history[static_cast<std::size_t>(active[y])];
        if (block_gap(ex.block, ey.block) > param.threshold) continue;
        if (sets_adjacent(ex.sites, ey.sites, param.threshold))
          candidates.emplace_back(active[x], active[y]);
      }
    }
    if (candidates.empty()) break;

    std::pair<int, int> chosen;
    if (policy == MergePolicy::randomized) {
      chosen = candidates[static_cast<std::size_t>(rng.next() % candidates.size())];
    } else {
      // lowest canonical pair: order each pair by minimal site, compare
      // (min site of union, min site of the other set) lexicographically
      std::size_t best = 0;
      const auto key = [&trace](const std::pair<int, int>& pr) {
        const Site& ka = trace.history[static_cast<std::size_t>(pr.first)].sites.front();
        const Site& kb = trace.history[static_cast<std::size_t>(pr.second)].sites.front();
        return ka < kb ? std::make_pair(ka, kb) : std::make_pair(kb, ka);
      };
      for (std::size_t c = 1; c < candidates.size(); ++c)
        if (key(candidates[c]) < key(candidates[best])) best = c;
      chosen = candidates[best];
    }

    const auto& ea = trace.history[static_cast<std::size_t>(chosen.first)];
    const auto& eb = trace.history[static_cast<std::size_t>(chosen.second)];
    Configuration scratch(config.dims(), config.geometry());
    for (const Site& s : ea.sites) scratch.infect(s);
    for (const Site& s : eb.sites) scratch.infect(s);
    const Configuration merged = closure(scratch, family);

    std::vector<Site> merged_sites = merged.infected_sites();  // index order = lexicographic
    Block merged_block = bounding_block(merged_sites);
    const Coord merged_diam = merged_block.long_side();
    if (family.nr_spec() && merged_diam > ea.diameter + eb.diameter + param.threshold)
      throw std::logic_error("merge diameter exceeded the subadditive bound");
    trace.history.push_back(ProcessTrace::Entry{std::move(merged_sites), std::move(merged_block),
                                                merged_diam, chosen.first, chosen.second});

    std::erase(active, chosen.first);
    std::erase(active, chosen.second);
    active.push_back(static_cast<int>(trace.history.size()) - 1);
  }

  std::sort(active.begin(), active.end(), [&trace](int a, int b) {
    return trace.history[static_cast<std::size_t>(a)].sites.front() <
           trace.history[static_cast<std::size_t>(b)].sites.front();
  });
  trace.final_entries = std::move(active);
  return trace;
}

ComponentCollection components_process(const Configuration& config, const UpdateFamily& family,
                                       StrongGraphParam param) {
  const ProcessTrace trace = components_process_trace(config, family, param);
  ComponentCollection out;
  out.sets.reserve(trace.final_entries.size());
  for (int e : trace.final_entries)
    out.sets.push_back(trace.history[static_cast<std::size_t>(e)].sites);
  return out;
}

Block al_witness_block(const ProcessTrace& trace, Coord k) {
  if (k < 1) throw std::invalid_argument("witness scale k must be >= 1");
  if (k > trace.closure_diameter())
    throw std::runtime_error("no witness at this scale (k exceeds diam of the closure)");
  for (const auto& e : trace.history)
    if (e.diameter >= k) return e.block;
  throw std::logic_error("witness scan failed despite sufficient diameter");
}

Block al_witness_block(const Configuration& config, const UpdateFamily& family,
                       StrongGraphParam param, Coord k) {
  return al_witness_block(components_process_trace(config, family, param), k);
}

SlabWitness al_witness_slab(const ProcessTrace& trace, Coord l, Coord k) {
  if (l < 1 || k < 1) throw std::invalid_argument("witness targets must be >= 1");
  const Coord D = trace.closure_diameter();
  if (k > D || l > D)
    throw std::runtime_error("no witness at this scale (target exceeds diam of the closure)");
  for (const auto& e : trace.history) {
    if (e.block.dimension() < 2)
      throw std::invalid_argument("slab witness needs dimension >= 2");
    Coord base = 0;
    for (int j = 0; j + 1 < e.block.dimension(); ++j) base = std::max(base, e.block.side(j));
    const Coord h = e.block.side(e.block.dimension() - 1);
    if (base >= l || h >= k) return SlabWitness{e.block, base, h};
  }
  throw std::logic_error("witness scan failed despite sufficient diameter");
}

SlabWitness al_witness_slab(const Configuration& config, const UpdateFamily& family,
                            StrongGraphParam param, Coord l, Coord k) {
  return al_witness_slab(components_process_trace(config, family, param), l, k);
}

}  // namespace bperc
