#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "polarlr/channel_model.hpp"
#include "polarlr/construction.hpp"

using namespace polarlr;

namespace {

std::vector<SyntheticChannelRecord> bec_leaves(double eps, int depth) {
  EvolveOptions opt;
  return evolve_tree(make_bec(eps), depth, opt).leaves();
}

}  // namespace

TEST_CASE("select_frozen worked examples") {
  const auto records = bec_leaves(0.5, 2);
  SUBCASE("k = 1 by q picks the all-plus leaf") {
    const CodeSpec code = select_frozen(records, 1, ConstructionMetric::kQ);
    REQUIRE(code.info_set.size() == 1);
    CHECK(code.info_set[0] == 3);
    CHECK(code.union_bound == doctest::Approx((1.0 - 0.9375) / 2.0).epsilon(1e-12));
    CHECK(code.frozen_set.size() == 3);
  }
  SUBCASE("k = 0") {
    const CodeSpec code = select_frozen(records, 0, ConstructionMetric::kPe);
    CHECK(code.info_set.empty());
    CHECK(code.union_bound == 0.0);
    CHECK(code.frozen_set.size() == 4);
  }
  SUBCASE("k = N") {
    const CodeSpec code = select_frozen(records, 4, ConstructionMetric::kPe);
    CHECK(code.frozen_set.empty());
    CHECK(code.info_set.size() == 4);
  }
  SUBCASE("out of range") {
    CHECK_THROWS_AS(select_frozen(records, 5, ConstructionMetric::kPe),
                    std::domain_error);
    CHECK_THROWS_AS(select_frozen(records, -1, ConstructionMetric::kPe),
                    std::domain_error);
  }
}

TEST_CASE("selection is invariant under record order and ties break by index") {
  auto records = bec_leaves(0.5, 4);
  const CodeSpec base = select_frozen(records, 7, ConstructionMetric::kPe);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(records.begin(), records.end(), rng);
    const CodeSpec shuffled = select_frozen(records, 7, ConstructionMetric::kPe);
    CHECK(shuffled.info_set == base.info_set);
    CHECK(shuffled.union_bound == base.union_bound);
  }
  // constructed records with an exact metric tie: the smaller index wins
  std::vector<SyntheticChannelRecord> tied(4);
  for (int i = 0; i < 4; ++i) {
    tied[static_cast<std::size_t>(i)].path = PathIndex{2, static_cast<std::uint32_t>(i)};
    tied[static_cast<std::size_t>(i)].metrics.pe = i < 2 ? 0.25 : 0.5;
  }
  const CodeSpec one = select_frozen(tied, 3, ConstructionMetric::kPe);
  CHECK(one.info_set == std::vector<int>{0, 1, 2});
}

TEST_CASE("incomplete or duplicated record sets are rejected") {
  auto records = bec_leaves(0.5, 3);
  records.pop_back();
  CHECK_THROWS_AS(select_frozen(records, 2, ConstructionMetric::kPe),
                  std::invalid_argument);
  auto dup = bec_leaves(0.5, 3);
  dup[1] = dup[0];
  CHECK_THROWS_AS(select_frozen(dup, 2, ConstructionMetric::kPe),
                  std::invalid_argument);
}

TEST_CASE("compare_constructions") {
  const auto records = bec_leaves(0.5, 3);
  const CodeSpec a = select_frozen(records, 3, ConstructionMetric::kPe);
  SUBCASE("identical specs") {
    const ConstructionDiff diff = compare_constructions(a, a);
    CHECK(diff.overlap == 3);
    CHECK(diff.only_a.empty());
    CHECK(diff.only_b.empty());
  }
  SUBCASE("swapped rank produces exactly that pair") {
    CodeSpec b = a;
    // replace the largest info index with an index not in the set
    const int out = a.info_set.back();
    int in = 0;
    while (std::binary_search(b.info_set.begin(), b.info_set.end(), in)) ++in;
    b.info_set.back() = in;
    std::sort(b.info_set.begin(), b.info_set.end());
    const ConstructionDiff diff = compare_constructions(a, b);
    CHECK(diff.overlap == 2);
    REQUIRE(diff.only_a.size() == 1);
    REQUIRE(diff.only_b.size() == 1);
    CHECK(diff.only_a[0] == out);
    CHECK(diff.only_b[0] == in);
  }
  SUBCASE("mismatched shapes are rejected") {
    const CodeSpec b = select_frozen(records, 2, ConstructionMetric::kPe);
    CHECK_THROWS_AS(compare_constructions(a, b), std::invalid_argument);
  }
}

TEST_CASE("exact and min-sum constructions agree on the BEC") {
  EvolveOptions exact_opt;
  EvolveOptions minsum_opt;
  minsum_opt.kernel = KernelId::minsum();
  const auto ra = evolve_tree(make_bec(0.5), 2, exact_opt).leaves();
  const auto rb = evolve_tree(make_bec(0.5), 2, minsum_opt).leaves();
  const CodeSpec a = select_frozen(ra, 1, ConstructionMetric::kPe);
  const CodeSpec b = select_frozen(rb, 1, ConstructionMetric::kPe);
  const ConstructionDiff diff = compare_constructions(a, b);
  CHECK(diff.only_a.empty());
  CHECK(diff.only_b.empty());
}

TEST_CASE("BEC union bound decreases with depth at fixed rate") {
  double prev = 1e9;
  for (int n = 3; n <= 7; ++n) {
    const auto records = bec_leaves(0.5, n);
    const CodeSpec code =
        select_frozen(records, (1 << n) / 4, ConstructionMetric::kPe);
    CHECK(code.union_bound < prev);
    prev = code.union_bound;
  }
}
