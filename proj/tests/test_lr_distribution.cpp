#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polarlr/lr_distribution.hpp"
#include "polarlr/rng.hpp"

using namespace polarlr;

TEST_CASE("round_sig keeps 15 significant digits and is idempotent") {
  CHECK(round_sig(0.0) == 0.0);
  CHECK(round_sig(1.0) == 1.0);
  CHECK(round_sig(0.123456789012345678) == doctest::Approx(0.123456789012346).epsilon(1e-15));
  CHECK(round_sig(123456789.0123456789) == doctest::Approx(123456789.012346).epsilon(1e-15));

  Rng rng(42);
  for (int i = 0; i < 20000; ++i) {
    const double v = std::exp(rng.uniform(-40.0, 40.0));
    const double r = round_sig(v);
    CHECK(round_sig(r) == r);  // exact idempotence
    CHECK(std::fabs(r - v) <= 5.1e-15 * v);
  }
  // extreme magnitudes go through the decimal string fallback
  for (double v : {1e-300, 3.25e-200, 7.5e120, 1e300}) {
    const double r = round_sig(v);
    CHECK(round_sig(r) == r);
    CHECK(std::fabs(r - v) <= 5.1e-15 * v);
  }
}

TEST_CASE("round_sig snaps the 1e-13 neighborhood of 1") {
  CHECK(round_sig(1.0 + 5e-14) == 1.0);
  CHECK(round_sig(1.0 - 5e-14) == 1.0);
  CHECK(round_sig(1.0 + 5e-13) != 1.0);
  CHECK(round_sig(1.0 - 5e-13) != 1.0);
  CHECK(round_sig(std::nextafter(1.0, 2.0)) == 1.0);
}

TEST_CASE("round_sig rejects invalid input") {
  CHECK_THROWS_AS(round_sig(-1.0), std::domain_error);
  CHECK_THROWS_AS(round_sig(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("assemble_symmetric merges duplicates and synthesizes the mirror") {
  LRDistribution d =
      assemble_symmetric({{1.0, 0.5}, {1.0, 0.5}}, kDefaultTolerance);
  REQUIRE(d.size() == 1);
  CHECK(d.atoms[0].lr == 1.0);
  CHECK(d.atoms[0].mass == 1.0);
  CHECK(d.symmetric);

  // one below-1 atom implies its partner
  LRDistribution e = assemble_symmetric({{0.5, 2.0 / 3.0}}, kDefaultTolerance);
  REQUIRE(e.size() == 2);
  CHECK(e.atoms[0].lr == 0.5);
  CHECK(e.atoms[1].lr == 2.0);
  CHECK(e.atoms[1].mass == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(e.mass_sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(symmetry_violation(e) < 1e-12);
}

TEST_CASE("assembly prunes dust with proportional redistribution") {
  LRDistribution d = assemble_symmetric(
      {{0.25, 0.6}, {0.5, 0.4 - 1e-16}, {0.3, 1e-16}}, kDefaultTolerance);
  for (const auto& a : d.atoms) CHECK(a.mass >= kMassPruneFloor);
  // below-1 mass total is preserved by the redistribution
  double below = 0.0;
  for (const auto& a : d.atoms)
    if (a.lr < 1.0) below += a.mass;
  CHECK(below == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("canonicalize matches the operation examples") {
  SUBCASE("duplicate merge") {
    LRDistribution raw;
    raw.atoms = {{1.0, 0.5}, {1.0, 0.5}};
    const LRDistribution d = canonicalize(raw);
    REQUIRE(d.size() == 1);
    CHECK(d.atoms[0].lr == 1.0);
    CHECK(d.atoms[0].mass == 1.0);
  }
  SUBCASE("already canonical stays put") {
    LRDistribution raw;
    raw.atoms = {{0.5, 2.0 / 3.0}, {2.0, 1.0 / 3.0}};
    const LRDistribution d = canonicalize(raw);
    REQUIRE(d.size() == 2);
    CHECK(d.atoms[0].lr == 0.5);
    CHECK(d.atoms[0].mass == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(d.atoms[1].mass == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("gross asymmetry is repaired by pair projection") {
    LRDistribution raw;
    raw.atoms = {{0.5, 0.70}, {2.0, 0.30}};
    const LRDistribution d = canonicalize(raw);
    REQUIRE(d.size() == 2);
    // pair total preserved, masses moved onto mass(2) = 0.5 * mass(0.5)
    CHECK(d.atoms[0].mass == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(d.atoms[1].mass == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(d.atoms[1].mass == 0.5 * d.atoms[0].mass);
  }
  SUBCASE("idempotence is exact") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      LRDistribution raw;
      double total = 0.0;
      const int n = 1 + static_cast<int>(rng.next_below(6));
      for (int i = 0; i < n; ++i) {
        const double lr = std::exp(rng.uniform(-6.0, 6.0));
        const double m = rng.uniform(0.01, 1.0);
        raw.atoms.push_back({lr, m});
        total += m;
      }
      for (auto& a : raw.atoms) a.mass /= total;
      const LRDistribution once = canonicalize(raw);
      const LRDistribution twice = canonicalize(once);
      REQUIRE(once.size() == twice.size());
      for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once.atoms[i].lr == twice.atoms[i].lr);
        CHECK(once.atoms[i].mass == twice.atoms[i].mass);
      }
    }
  }
  SUBCASE("a lone above-1 atom gets its partner synthesized") {
    LRDistribution raw;
    raw.atoms = {{4.0, 1.0}};
    const LRDistribution d = canonicalize(raw);
    REQUIRE(d.size() == 2);
    CHECK(d.atoms[0].lr == 0.25);
    CHECK(d.atoms[0].mass == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(d.atoms[1].mass == doctest::Approx(0.2).epsilon(1e-15));
    const LRDistribution again = canonicalize(d);
    REQUIRE(again.size() == 2);
    CHECK(again.atoms[0].mass == d.atoms[0].mass);
    CHECK(again.atoms[1].mass == d.atoms[1].mass);
  }
  SUBCASE("total mass off by more than 10x tolerance is an error") {
    LRDistribution raw;
    raw.atoms = {{0.5, 0.5}};
    raw.tolerance = 1e-9;
    CHECK_THROWS_AS(canonicalize(raw), std::invalid_argument);
  }
}

TEST_CASE("validate_basic catches structural violations") {
  LRDistribution good;
  good.atoms = {{0.5, 2.0 / 3.0}, {2.0, 1.0 / 3.0}};
  CHECK_NOTHROW(validate_basic(good));

  LRDistribution unsorted;
  unsorted.atoms = {{2.0, 0.5}, {0.5, 0.5}};
  CHECK_THROWS_AS(validate_basic(unsorted), std::invalid_argument);

  LRDistribution negative;
  negative.atoms = {{0.5, -0.1}, {2.0, 1.1}};
  CHECK_THROWS_AS(validate_basic(negative), std::invalid_argument);

  LRDistribution short_mass;
  short_mass.atoms = {{0.5, 0.4}};
  CHECK_THROWS_AS(validate_basic(short_mass), std::invalid_argument);
}

TEST_CASE("validate_symmetric accepts mirrors and rejects asymmetry") {
  const LRDistribution d =
      assemble_symmetric({{0.2, 1.0 / 1.2}}, kDefaultTolerance);
  CHECK_NOTHROW(validate_symmetric(d));

  LRDistribution bad;
  bad.atoms = {{0.2, 0.5}, {5.0, 0.5}};  // want mass(5) = 0.1
  CHECK_THROWS_AS(validate_symmetric(bad), std::invalid_argument);
}

TEST_CASE("approx_equal tolerates rounding-route noise") {
  const LRDistribution a = assemble_symmetric({{0.25, 0.8}}, kDefaultTolerance);
  LRDistribution b = a;
  b.atoms[0].lr = std::nextafter(b.atoms[0].lr, 1.0);
  CHECK(approx_equal(a, b, 1e-10, 1e-10));
  b.atoms[0].mass += 1e-6;
  CHECK_FALSE(approx_equal(a, b, 1e-10, 1e-10));
}
