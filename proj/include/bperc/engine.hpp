#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bperc/lattice.hpp"

namespace bperc {

using Rule = std::vector<Offset>;

inline constexpr std::uint64_t kDefaultRuleCap = 200000;

/// A finite update family. Two forms share one contract:
///  - counting: a site infects when at least `threshold` of `offsets` point at
///    infected sites (equivalently, the family of all threshold-subsets);
///  - explicit_rules: a site infects when some rule is fully infected.
class UpdateFamily {
 public:
  enum class Form { counting, explicit_rules };

  static UpdateFamily counting(std::vector<Offset> offsets, int threshold, int dimension);
  static UpdateFamily explicit_rules(std::vector<Rule> rules, int dimension);

  Form form() const { return form_; }
  bool is_counting() const { return form_ == Form::counting; }
  int dimension() const { return dimension_; }

  const std::vector<Offset>& offsets() const;  // counting form only
  int threshold() const;                       // counting form only
  const std::vector<Rule>& rules() const;      // explicit form only

  const std::optional<NeighborhoodSpec>& nr_spec() const { return nr_spec_; }

 private:
  UpdateFamily() = default;
  friend UpdateFamily make_nr_family(const NeighborhoodSpec&);

  Form form_ = Form::counting;
  int dimension_ = 0;
  std::vector<Offset> offsets_;
  int threshold_ = 0;
  std::vector<Rule> rules_;
  std::optional<NeighborhoodSpec> nr_spec_;
};

/// N_r^{a_1,...,a_d} as a counting family over the neighborhood offsets.
/// The r-subset enumeration stays implicit; see materialize_rules.
UpdateFamily make_nr_family(const NeighborhoodSpec& spec);

/// Explicit enumeration of a counting family as all threshold-subsets of its
/// offsets. Throws when the subset count exceeds `cap`. Explicit families are
/// returned as-is.
std::vector<Rule> materialize_rules(const UpdateFamily& family,
                                    std::uint64_t cap = kDefaultRuleCap);

/// Number of rules the family represents (binomial for counting form).
std::uint64_t rule_count(const UpdateFamily& family);

/// One synchronous update: every healthy site with a satisfied rule infects.
Configuration step(const Configuration& config, const UpdateFamily& family);

/// Least fixed point of step. Dispatches to the counting path for counting
/// families, generic fixed-point iteration otherwise.
Configuration closure(const Configuration& config, const UpdateFamily& family);

/// Oracle path: iterate step until nothing changes. Works for either form.
Configuration closure_generic(const Configuration& config, const UpdateFamily& family);

/// Frontier-queue path for counting families: per-site infected-neighbor
/// counters, amortized O(|offsets|) work per infection.
Configuration closure_counting(const Configuration& config, const UpdateFamily& family);

bool percolates(const Configuration& config, const UpdateFamily& family);

}  // namespace bperc
