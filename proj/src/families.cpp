#include "bperc/families.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bperc {

std::string to_string(CriticalityLabel label) {
  switch (label) {
    case CriticalityLabel::supercritical: return "supercritical";
    case CriticalityLabel::critical: return "critical";
    case CriticalityLabel::subcritical: return "subcritical";
  }
  return "?";
}

Direction::Direction(Offset vec) : v(std::move(vec)) {
  if (v.empty()) throw std::invalid_argument("direction needs dimension >= 1");
  Coord g = 0;
  for (Coord c : v) g = std::gcd(g, c < 0 ? -c : c);
  if (g == 0) throw std::invalid_argument("direction must be nonzero");
  for (Coord& c : v) c /= g;
}

bool is_rule_in_halfspace(const Rule& rule, const Direction& dir) {
  if (rule.empty()) throw std::invalid_argument("rule must be nonempty");
  for (const Offset& x : rule) {
    if (x.size() != dir.v.size()) throw std::invalid_argument("dimension mismatch");
    Coord dot = 0;
    for (std::size_t j = 0; j < x.size(); ++j) dot += x[j] * dir.v[j];
    if (dot >= 0) return false;
  }
  return true;
}

bool is_stable_direction(const UpdateFamily& family, const Direction& dir) {
  if (static_cast<int>(dir.v.size()) != family.dimension())
    throw std::invalid_argument("dimension mismatch");
  if (family.is_counting()) {
    // Some threshold-subset fits the half-space iff at least `threshold`
    // offsets have strictly negative inner product.
    int negatives = 0;
    for (const Offset& x : family.offsets()) {
      Coord dot = 0;
      for (std::size_t j = 0; j < x.size(); ++j) dot += x[j] * dir.v[j];
      if (dot < 0) ++negatives;
    }
    return negatives < family.threshold();
  }
  for (const Rule& rule : family.rules())
    if (is_rule_in_halfspace(rule, dir)) return false;
  return true;
}

CriticalityLabel classify_nr(const NeighborhoodSpec& spec) {
  if (spec.r <= spec.max_exponent()) return CriticalityLabel::supercritical;
  if (spec.r <= spec.sum_exponents()) return CriticalityLabel::critical;
  return CriticalityLabel::subcritical;
}

bool StableSetDescriptor::contains(const Direction& dir) const {
  const auto support_within = [&dir](std::initializer_list<int> axes) {
    for (std::size_t j = 0; j < dir.v.size(); ++j) {
      if (dir.v[j] == 0) continue;
      bool allowed = false;
      for (int ax : axes) allowed = allowed || static_cast<int>(j) + 1 == ax;
      if (!allowed) return false;
    }
    return true;
  };
  for (const Part& part : parts) {
    if (const auto* ap = std::get_if<AxisPair>(&part)) {
      if (support_within({ap->axis})) return true;
    } else if (const auto* ct = std::get_if<CircleThrough>(&part)) {
      if (support_within({ct->i, ct->k})) return true;
    } else if (const auto* so = std::get_if<SphereOrth>(&part)) {
      if (dir.v[static_cast<std::size_t>(so->axis - 1)] == 0) return true;
    }
  }
  return false;
}

std::string StableSetDescriptor::text() const {
  if (!covered) return "not-covered";
  std::string out;
  int run_lo = 0, run_hi = 0;  // compress consecutive axis pairs
  const auto flush_axes = [&] {
    if (run_lo == 0) return;
    if (!out.empty()) out += '+';
    out += "axes(" + std::to_string(run_lo) + ".." + std::to_string(run_hi) + ")";
    run_lo = run_hi = 0;
  };
  for (const Part& part : parts) {
    if (const auto* ap = std::get_if<AxisPair>(&part)) {
      if (run_lo != 0 && ap->axis == run_hi + 1) {
        run_hi = ap->axis;
      } else {
        flush_axes();
        run_lo = run_hi = ap->axis;
      }
    } else if (const auto* ct = std::get_if<CircleThrough>(&part)) {
      flush_axes();
      if (!out.empty()) out += '+';
      out += "circle(" + std::to_string(ct->i) + "," + std::to_string(ct->k) + ")";
    } else if (const auto* so = std::get_if<SphereOrth>(&part)) {
      flush_axes();
      if (!out.empty()) out += '+';
      out += "sphere-orth(" + std::to_string(so->axis) + ")";
    }
  }
  flush_axes();
  return out;
}

StableSetDescriptor stable_set_descriptor(const NeighborhoodSpec& spec) {
  StableSetDescriptor desc;
  if (spec.d < 2) return desc;

  const auto& a = spec.a;
  const int d = spec.d;
  const int r = spec.r;
  const int sum = spec.sum_exponents();

  struct ListedCase {
    int lo, hi;  // matches when lo < r <= hi
    std::vector<StableSetDescriptor::Part> parts;
  };
  std::vector<ListedCase> cases;

  {  // discrete axes
    ListedCase c{a[static_cast<std::size_t>(d - 1)], a[0] + a[1], {}};
    for (int j = 1; j <= d; ++j) c.parts.push_back(StableSetDescriptor::AxisPair{j});
    cases.push_back(std::move(c));
  }
  if (d >= 3) {  // one circle plus remaining axes
    ListedCase c{a[0] + a[1], a[0] + a[2], {}};
    c.parts.push_back(StableSetDescriptor::CircleThrough{1, 2});
    for (int j = 3; j <= d; ++j) c.parts.push_back(StableSetDescriptor::AxisPair{j});
    cases.push_back(std::move(c));
  }
  if (d >= 3) {  // two circles plus remaining axes
    // As written the case tops out at a_2+a_3; for d >= 4 it is only exact up
    // to the elided next breakpoint a_1+a_4, so clip there.
    int hi = a[1] + a[2];
    if (d >= 4) hi = std::min(hi, a[0] + a[3]);
    ListedCase c{a[0] + a[2], hi, {}};
    c.parts.push_back(StableSetDescriptor::CircleThrough{1, 2});
    c.parts.push_back(StableSetDescriptor::CircleThrough{1, 3});
    for (int j = 4; j <= d; ++j) c.parts.push_back(StableSetDescriptor::AxisPair{j});
    cases.push_back(std::move(c));
  }
  {  // union of coordinate spheres
    ListedCase c{sum - a[0], sum, {}};
    for (int j = 1; j <= d; ++j) c.parts.push_back(StableSetDescriptor::SphereOrth{j});
    cases.push_back(std::move(c));
  }

  // The listed cases all live in the critical regime r > a_d.
  if (r <= a[static_cast<std::size_t>(d - 1)]) return desc;

  int matches = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (cases[i].lo < r && r <= cases[i].hi) {
      ++matches;
      if (!desc.covered) {
        desc.covered = true;
        desc.matched_case = static_cast<int>(i);
        desc.parts = cases[i].parts;
      }
    }
  }
  desc.boundary_tie = matches > 1;
  return desc;
}

}  // namespace bperc
