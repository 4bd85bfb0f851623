#include "bperc/engine.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>

namespace bperc {

namespace {

void validate_offset(const Offset& o, int d) {
  if (static_cast<int>(o.size()) != d)
    throw std::invalid_argument("offset dimension mismatch");
  bool all_zero = true;
  for (Coord c : o) all_zero = all_zero && c == 0;
  if (all_zero) throw std::invalid_argument("update rules must not contain the zero vector");
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > cap) return cap + 1;
  }
  return static_cast<std::uint64_t>(c);
}

struct PreparedOffset {
  bool axis_aligned;
  int axis;
  Coord delta;
  Offset vec;
};

std::vector<PreparedOffset> prepare(const std::vector<Offset>& offsets, int d, bool negate) {
  std::vector<PreparedOffset> out;
  out.reserve(offsets.size());
  for (const Offset& o : offsets) {
    PreparedOffset p;
    p.vec = o;
    if (negate)
      for (Coord& c : p.vec) c = -c;
    int nonzero_axis = 0;
    int nonzero_count = 0;
    for (int j = 0; j < d; ++j)
      if (p.vec[static_cast<std::size_t>(j)] != 0) {
        nonzero_axis = j;
        ++nonzero_count;
      }
    p.axis_aligned = nonzero_count == 1;
    p.axis = nonzero_axis;
    p.delta = p.axis_aligned ? p.vec[static_cast<std::size_t>(nonzero_axis)] : 0;
    out.push_back(std::move(p));
  }
  return out;
}

// Flat index of idx + offset, or -1 when it leaves a cube domain.
inline std::ptrdiff_t neighbor_index(const Configuration& cfg, std::size_t idx,
                                     const Coord* coords, const PreparedOffset& po) {
  const auto& dims = cfg.dims();
  const auto& strides = cfg.strides();
  if (po.axis_aligned) {
    const std::size_t j = static_cast<std::size_t>(po.axis);
    const Coord L = dims[j];
    const Coord c = coords[j] + po.delta;
    if (cfg.geometry() == Geometry::cube) {
      if (c < 1 || c > L) return -1;
      return static_cast<std::ptrdiff_t>(idx) + po.delta * static_cast<std::ptrdiff_t>(strides[j]);
    }
    const Coord wrapped = ((c - 1) % L + L) % L + 1;
    return static_cast<std::ptrdiff_t>(idx) +
           (wrapped - coords[j]) * static_cast<std::ptrdiff_t>(strides[j]);
  }
  std::ptrdiff_t nidx = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    Coord c = coords[j] + po.vec[j];
    const Coord L = dims[j];
    if (cfg.geometry() == Geometry::cube) {
      if (c < 1 || c > L) return -1;
    } else {
      c = ((c - 1) % L + L) % L + 1;
    }
    nidx += static_cast<std::ptrdiff_t>(c - 1) * static_cast<std::ptrdiff_t>(strides[j]);
  }
  return nidx;
}

inline void decode(const Configuration& cfg, std::size_t idx, Coord* coords) {
  const auto& strides = cfg.strides();
  for (std::size_t j = 0; j < strides.size(); ++j) {
    coords[j] = static_cast<Coord>(idx / strides[j]) + 1;
    idx %= strides[j];
  }
}

void check_compatible(const Configuration& config, const UpdateFamily& family) {
  if (family.dimension() != config.dimension())
    throw std::invalid_argument("family and configuration dimension mismatch");
}

}  // namespace

UpdateFamily UpdateFamily::counting(std::vector<Offset> offsets, int threshold, int dimension) {
  if (offsets.empty()) throw std::invalid_argument("counting family needs offsets");
  if (offsets.size() > 65535) throw std::invalid_argument("counting family too large");
  for (const Offset& o : offsets) validate_offset(o, dimension);
  std::vector<Offset> sorted = offsets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("counting family offsets must be distinct");
  if (threshold < 1 || threshold > static_cast<int>(offsets.size()))
    throw std::invalid_argument("counting threshold must be in [1, |offsets|]");
  UpdateFamily f;
  f.form_ = Form::counting;
  f.dimension_ = dimension;
  f.offsets_ = std::move(offsets);
  f.threshold_ = threshold;
  return f;
}

UpdateFamily UpdateFamily::explicit_rules(std::vector<Rule> rules, int dimension) {
  if (rules.empty()) throw std::invalid_argument("update family needs at least one rule");
  for (Rule& rule : rules) {
    if (rule.empty()) throw std::invalid_argument("update rules must be nonempty");
    for (const Offset& o : rule) validate_offset(o, dimension);
    std::sort(rule.begin(), rule.end());
    rule.erase(std::unique(rule.begin(), rule.end()), rule.end());
  }
  UpdateFamily f;
  f.form_ = Form::explicit_rules;
  f.dimension_ = dimension;
  f.rules_ = std::move(rules);
  return f;
}

const std::vector<Offset>& UpdateFamily::offsets() const {
  if (form_ != Form::counting) throw std::logic_error("not a counting family");
  return offsets_;
}

int UpdateFamily::threshold() const {
  if (form_ != Form::counting) throw std::logic_error("not a counting family");
  return threshold_;
}

const std::vector<Rule>& UpdateFamily::rules() const {
  if (form_ != Form::explicit_rules) throw std::logic_error("family has no explicit rules");
  return rules_;
}

UpdateFamily make_nr_family(const NeighborhoodSpec& spec) {
  UpdateFamily f;
  f.form_ = UpdateFamily::Form::counting;
  f.dimension_ = spec.d;
  f.offsets_ = neighborhood_offsets(spec);
  f.threshold_ = spec.r;
  f.nr_spec_ = spec;
  return f;
}

std::uint64_t rule_count(const UpdateFamily& family) {
  if (family.is_counting())
    return binomial_capped(family.offsets().size(),
                           static_cast<std::uint64_t>(family.threshold()),
                           UINT64_MAX - 1);
  return family.rules().size();
}

std::vector<Rule> materialize_rules(const UpdateFamily& family, std::uint64_t cap) {
  if (!family.is_counting()) return family.rules();
  const auto& offsets = family.offsets();
  const std::size_t n = offsets.size();
  const std::size_t k = static_cast<std::size_t>(family.threshold());
  const std::uint64_t count = binomial_capped(n, k, cap);
  if (count > cap)
    throw std::runtime_error("explicit rule enumeration exceeds cap of " + std::to_string(cap));
  std::vector<Rule> rules;
  rules.reserve(count);
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    Rule rule;
    rule.reserve(k);
    for (std::size_t i : pick) rule.push_back(offsets[i]);
    rules.push_back(std::move(rule));
    // next combination in lexicographic order
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return rules;
}

Configuration step(const Configuration& config, const UpdateFamily& family) {
  check_compatible(config, family);
  Configuration out = config;
  std::vector<Coord> coords(static_cast<std::size_t>(config.dimension()));
  if (family.is_counting()) {
    const auto prepared = prepare(family.offsets(), config.dimension(), false);
    const int thr = family.threshold();
    for (std::size_t idx = 0; idx < config.volume(); ++idx) {
      if (config.infected(idx)) continue;
      decode(config, idx, coords.data());
      int cnt = 0;
      for (const auto& po : prepared) {
        const std::ptrdiff_t nidx = neighbor_index(config, idx, coords.data(), po);
        if (nidx >= 0 && config.infected(static_cast<std::size_t>(nidx)) && ++cnt >= thr) {
          out.infect(idx);
          break;
        }
      }
    }
    return out;
  }
  std::vector<std::vector<PreparedOffset>> prepared_rules;
  prepared_rules.reserve(family.rules().size());
  for (const Rule& rule : family.rules())
    prepared_rules.push_back(prepare(rule, config.dimension(), false));
  for (std::size_t idx = 0; idx < config.volume(); ++idx) {
    if (config.infected(idx)) continue;
    decode(config, idx, coords.data());
    for (const auto& rule : prepared_rules) {
      bool satisfied = true;
      for (const auto& po : rule) {
        const std::ptrdiff_t nidx = neighbor_index(config, idx, coords.data(), po);
        if (nidx < 0 || !config.infected(static_cast<std::size_t>(nidx))) {
          satisfied = false;
          break;
        }
      }
      if (satisfied) {
        out.infect(idx);
        break;
      }
    }
  }
  return out;
}

Configuration closure_generic(const Configuration& config, const UpdateFamily& family) {
  Configuration cur = config;
  while (true) {
    Configuration next = step(cur, family);
    if (next.infected_count() == cur.infected_count()) return cur;
    cur = std::move(next);
  }
}

Configuration closure_counting(const Configuration& config, const UpdateFamily& family) {
  check_compatible(config, family);
  if (!family.is_counting())
    throw std::invalid_argument("counting closure requires a counting family");
  Configuration out = config;
  const int thr = family.threshold();
  // Scatter with negated offsets: infected x contributes to the count of
  // y = x - o, the site whose offset o points at x.
  const auto prepared = prepare(family.offsets(), config.dimension(), true);
  std::vector<std::uint16_t> counts(config.volume(), 0);
  std::vector<std::size_t> queue;
  queue.reserve(config.infected_count());
  const auto& words = out.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t word = words[w];
    while (word) {
      const int b = __builtin_ctzll(word);
      word &= word - 1;
      queue.push_back((w << 6) + static_cast<std::size_t>(b));
    }
  }
  std::vector<Coord> coords(static_cast<std::size_t>(config.dimension()));
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t idx = queue[head];
    decode(config, idx, coords.data());
    for (const auto& po : prepared) {
      const std::ptrdiff_t nidx = neighbor_index(out, idx, coords.data(), po);
      if (nidx < 0) continue;
      const std::size_t y = static_cast<std::size_t>(nidx);
      if (out.infected(y)) continue;
      if (static_cast<int>(++counts[y]) >= thr) {
        out.infect(y);
        queue.push_back(y);
      }
    }
  }
  return out;
}

Configuration closure(const Configuration& config, const UpdateFamily& family) {
  if (family.is_counting()) return closure_counting(config, family);
  return closure_generic(config, family);
}

bool percolates(const Configuration& config, const UpdateFamily& family) {
  return closure(config, family).full();
}

}  // namespace bperc
