#pragma once

#include <string>
#include <variant>
#include <vector>

#include "bperc/engine.hpp"
#include "bperc/lattice.hpp"

namespace bperc {

enum class CriticalityLabel { supercritical, critical, subcritical };

std::string to_string(CriticalityLabel label);

/// A rational direction, stored in primitive form (gcd of entries = 1).
struct Direction {
  Offset v;

  explicit Direction(Offset vec);
};

/// True iff every offset of the rule has strictly negative inner product with
/// the direction (the rule fits inside the open half-space of dir).
bool is_rule_in_halfspace(const Rule& rule, const Direction& dir);

/// True iff no rule of the family lies entirely in the open half-space of dir.
/// For counting families this checks whether at least `threshold` offsets have
/// negative inner product.
bool is_stable_direction(const UpdateFamily& family, const Direction& dir);

/// Closed-form label: supercritical iff r <= a_d, critical iff
/// a_d < r <= sum(a), subcritical iff r > sum(a).
CriticalityLabel classify_nr(const NeighborhoodSpec& spec);

/// Symbolic stable-set descriptor for N_r families. Axis indices are 1-based.
struct StableSetDescriptor {
  struct AxisPair {
    int axis;  // {+-e_axis}
    bool operator==(const AxisPair&) const = default;
  };
  struct CircleThrough {
    int i, k;  // the unit circle containing e_i and e_k
    bool operator==(const CircleThrough&) const = default;
  };
  struct SphereOrth {
    int axis;  // the (d-2)-sphere orthogonal to e_axis
    bool operator==(const SphereOrth&) const = default;
  };
  using Part = std::variant<AxisPair, CircleThrough, SphereOrth>;

  bool covered = false;   // false: r falls outside every listed case
  int matched_case = -1;  // 0-based position in the listed order
  bool boundary_tie = false;
  std::vector<Part> parts;

  /// Membership of a rational direction in the described set.
  bool contains(const Direction& dir) const;

  std::string text() const;
};

StableSetDescriptor stable_set_descriptor(const NeighborhoodSpec& spec);

}  // namespace bperc
