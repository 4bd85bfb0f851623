#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bperc/families.hpp"
#include "bperc/rng.hpp"
#include "testutil.hpp"

using namespace bperc;

namespace {

Direction axis_direction(int d, int axis, Coord sign = 1) {
  Offset v(static_cast<std::size_t>(d), 0);
  v[static_cast<std::size_t>(axis)] = sign;
  return Direction(v);
}

Direction random_direction(SplitMix64& rng, int d) {
  while (true) {
    Offset v(static_cast<std::size_t>(d));
    bool nonzero = false;
    for (Coord& c : v) {
      c = static_cast<Coord>(rng.next() % 9) - 4;
      nonzero = nonzero || c != 0;
    }
    if (nonzero) return Direction(v);
  }
}

}  // namespace

TEST_CASE("direction normalization") {
  CHECK(Direction({2, 4}).v == Offset{1, 2});
  CHECK(Direction({-2, -4}).v == Offset{-1, -2});
  CHECK(Direction({0, 3, 0}).v == Offset{0, 1, 0});
  CHECK_THROWS_AS(Direction({0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Direction({}), std::invalid_argument);
}

TEST_CASE("rule in half-space examples") {
  CHECK(is_rule_in_halfspace({{-1, 0}, {0, -1}}, Direction({1, 1})));
  CHECK_FALSE(is_rule_in_halfspace({{-1, 0}, {0, 1}}, Direction({1, 1})));
  CHECK(is_rule_in_halfspace({{-1}}, Direction({1})));
}

TEST_CASE("stable direction examples") {
  const auto n2 = make_nr_family(NeighborhoodSpec({1, 1}, 2));
  CHECK(is_stable_direction(n2, axis_direction(2, 1)));        // e2 stable
  CHECK_FALSE(is_stable_direction(n2, Direction({1, 1})));     // {-e1,-e2} fits
  // r > c: every canonical unit vector is stable
  for (int r = 5; r <= 14; ++r) {
    const auto family = make_nr_family(NeighborhoodSpec({1, 2, 4}, r));
    for (int axis = 0; axis < 3; ++axis) {
      CHECK(is_stable_direction(family, axis_direction(3, axis, 1)));
      CHECK(is_stable_direction(family, axis_direction(3, axis, -1)));
    }
  }
}

TEST_CASE("counting stability agrees with materialized rules") {
  SplitMix64 rng(606);
  for (int spec_it = 0; spec_it < 10; ++spec_it) {
    const auto spec = testutil::random_spec(rng, 2, 2);
    const auto counting_family = make_nr_family(spec);
    const auto explicit_family =
        UpdateFamily::explicit_rules(materialize_rules(counting_family), 2);
    for (int dir_it = 0; dir_it < 20; ++dir_it) {
      const Direction dir = random_direction(rng, 2);
      CHECK(is_stable_direction(counting_family, dir) ==
            is_stable_direction(explicit_family, dir));
    }
  }
}

TEST_CASE("stability is negation-symmetric") {
  SplitMix64 rng(707);
  for (int it = 0; it < 60; ++it) {
    const int d = 2 + static_cast<int>(rng.next() % 2);
    const auto family = make_nr_family(testutil::random_spec(rng, d, 3));
    const Direction dir = random_direction(rng, d);
    Offset neg = dir.v;
    for (Coord& c : neg) c = -c;
    CHECK(is_stable_direction(family, dir) == is_stable_direction(family, Direction(neg)));
  }
}

TEST_CASE("classify_nr examples") {
  CHECK(classify_nr(NeighborhoodSpec({1, 2, 4}, 8)) == CriticalityLabel::subcritical);
  CHECK(classify_nr(NeighborhoodSpec({1, 2, 4}, 4)) == CriticalityLabel::supercritical);
  CHECK(classify_nr(NeighborhoodSpec({1, 2, 4}, 5)) == CriticalityLabel::critical);
  CHECK(classify_nr(NeighborhoodSpec({1, 2, 4}, 7)) == CriticalityLabel::critical);
  CHECK(classify_nr(NeighborhoodSpec({1, 1}, 1)) == CriticalityLabel::supercritical);
  CHECK(classify_nr(NeighborhoodSpec({1, 1}, 2)) == CriticalityLabel::critical);
  CHECK(classify_nr(NeighborhoodSpec({1, 1}, 3)) == CriticalityLabel::subcritical);
}

TEST_CASE("classification agrees with axis stability checks") {
  for (int a1 = 1; a1 <= 4; ++a1)
    for (int a2 = a1; a2 <= 4; ++a2)
      for (int a3 = a2; a3 <= 4; ++a3)
        for (int r = 1; r <= 2 * (a1 + a2 + a3); ++r) {
          const NeighborhoodSpec spec({a1, a2, a3}, r);
          const auto family = make_nr_family(spec);
          bool some_axis_unstable = false;
          for (int axis = 0; axis < 3; ++axis)
            for (Coord sign : {-1, 1})
              some_axis_unstable = some_axis_unstable ||
                                   !is_stable_direction(family, axis_direction(3, axis, sign));
          const auto label = classify_nr(spec);
          CHECK((label == CriticalityLabel::supercritical) == some_axis_unstable);
          CHECK((label == CriticalityLabel::supercritical) == (r <= a3));
          CHECK((label == CriticalityLabel::subcritical) == (r > a1 + a2 + a3));
        }
}

TEST_CASE("stable set descriptor examples") {
  SUBCASE("discrete axes") {
    const auto desc = stable_set_descriptor(NeighborhoodSpec({1, 1, 1}, 2));
    REQUIRE(desc.covered);
    CHECK(desc.matched_case == 0);
    CHECK(desc.parts.size() == 3);
    CHECK(desc.text() == "axes(1..3)");
  }
  SUBCASE("union of spheres") {
    const auto desc = stable_set_descriptor(NeighborhoodSpec({1, 2, 4}, 7));
    REQUIRE(desc.covered);
    CHECK(desc.parts.size() == 3);
    CHECK(desc.text() == "sphere-orth(1)+sphere-orth(2)+sphere-orth(3)");
  }
  SUBCASE("circle plus axis") {
    const auto desc = stable_set_descriptor(NeighborhoodSpec({1, 1, 2}, 3));
    REQUIRE(desc.covered);
    CHECK(desc.text() == "circle(1,2)+axes(3..3)");
  }
  SUBCASE("d=2 boundary tie resolves to the first listed case") {
    const auto desc = stable_set_descriptor(NeighborhoodSpec({1, 1}, 2));
    REQUIRE(desc.covered);
    CHECK(desc.matched_case == 0);
    CHECK(desc.boundary_tie);
    CHECK(desc.text() == "axes(1..2)");
  }
  SUBCASE("outside every listed range") {
    CHECK_FALSE(stable_set_descriptor(NeighborhoodSpec({1, 1, 1, 1}, 3)).covered);
    CHECK_FALSE(stable_set_descriptor(NeighborhoodSpec({1, 2, 4}, 4)).covered);  // supercritical
    CHECK_FALSE(stable_set_descriptor(NeighborhoodSpec({1, 2, 4}, 8)).covered);  // subcritical
    CHECK(stable_set_descriptor(NeighborhoodSpec({1, 1, 1, 1}, 3)).text() == "not-covered");
  }
  SUBCASE("d=4 two-circle case holds only before the elided breakpoint") {
    CHECK_FALSE(stable_set_descriptor(NeighborhoodSpec({1, 2, 3, 3}, 5)).covered);
    const auto desc = stable_set_descriptor(NeighborhoodSpec({1, 2, 3, 4}, 5));
    REQUIRE(desc.covered);
    CHECK(desc.text() == "circle(1,2)+circle(1,3)+axes(4..4)");
  }
}

TEST_CASE("descriptor membership matches per-direction stability") {
  SplitMix64 rng(808);
  for (int a1 = 1; a1 <= 3; ++a1)
    for (int a2 = a1; a2 <= 3; ++a2)
      for (int a3 = a2; a3 <= 3; ++a3)
        for (int d = 2; d <= 4; ++d) {
          std::vector<int> a = {a1, a2};
          if (d >= 3) a.push_back(a3);
          if (d >= 4) a.push_back(a3);
          int sum = 0;
          for (int aj : a) sum += aj;
          for (int r = a.back() + 1; r <= sum; ++r) {
            const NeighborhoodSpec spec(a, r);
            const auto desc = stable_set_descriptor(spec);
            if (!desc.covered) continue;
            const auto family = make_nr_family(spec);
            for (int axis = 0; axis < d; ++axis) {
              const Direction e = axis_direction(d, axis);
              CHECK(desc.contains(e) == is_stable_direction(family, e));
            }
            for (int it = 0; it < 20; ++it) {
              const Direction dir = random_direction(rng, d);
              CHECK(desc.contains(dir) == is_stable_direction(family, dir));
            }
          }
        }
}
