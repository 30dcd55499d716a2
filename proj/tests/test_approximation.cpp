#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polarlr/approximation.hpp"
#include "polarlr/channel_model.hpp"
#include "polarlr/metrics.hpp"

using namespace polarlr;

TEST_CASE("lift is the diagonal embedding") {
  const JointLRDistribution j = lift(make_bec(0.5));
  REQUIRE(j.size() == 2);
  CHECK(j.atoms[0].lr_exact == 0.0);
  CHECK(j.atoms[0].lr_approx == 0.0);
  CHECK(j.atoms[0].mass == 0.5);
  CHECK(sign_agreement(j).trapped_mass == 0.0);
  CHECK(sign_agreement(j).mismatch_mass == 0.0);

  const JointLRDistribution jb = lift(make_bsc(0.11));
  REQUIRE(jb.size() == 2);
  CHECK(jb.atoms[0].lr_exact == jb.atoms[0].lr_approx);
  CHECK(sign_agreement(jb).trapped_mass == 0.0);
}

TEST_CASE("joint_step worked examples") {
  SUBCASE("BSC(0.11) minus with min-sum") {
    const JointLRDistribution j =
        joint_step(lift(make_bsc(0.11)), Branch::kMinus, KernelId::minsum());
    REQUIRE(j.size() == 2);
    CHECK(j.atoms[0].lr_exact == doctest::Approx(0.2434716).epsilon(1e-6));
    CHECK(j.atoms[0].lr_approx == doctest::Approx(0.1235955).epsilon(1e-6));
    CHECK(j.atoms[0].mass == doctest::Approx(0.8042).epsilon(1e-12));
    CHECK(j.atoms[1].lr_exact == doctest::Approx(4.1072523).epsilon(1e-6));
    CHECK(j.atoms[1].lr_approx == doctest::Approx(8.0909091).epsilon(1e-6));
    CHECK(j.atoms[1].mass == doctest::Approx(0.1958).epsilon(1e-12));
    CHECK(sign_agreement(j).mismatch_mass == 0.0);
  }
  SUBCASE("BEC(0.5) minus stays diagonal") {
    const JointLRDistribution j =
        joint_step(lift(make_bec(0.5)), Branch::kMinus, KernelId::minsum());
    REQUIRE(j.size() == 2);
    for (const auto& a : j.atoms) CHECK(a.lr_exact == a.lr_approx);
    CHECK(j.atoms[0].mass == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(j.atoms[1].mass == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("plus keeps diagonals diagonal") {
    const JointLRDistribution j =
        joint_step(lift(make_bsc(0.11)), Branch::kPlus, KernelId::minsum());
    for (const auto& a : j.atoms) CHECK(a.lr_exact == a.lr_approx);
    CHECK(sign_agreement(j).mismatch_mass == 0.0);
  }
  CHECK_THROWS_AS(joint_step(lift(make_bec(0.5)), Branch::kMinus, KernelId::exact()),
                  std::invalid_argument);
}

TEST_CASE("joint_step carries the perturbed kernel on the approx coordinate") {
  const JointLRDistribution j =
      joint_step(lift(make_bsc(0.11)), Branch::kMinus, KernelId::perturbed(0.5));
  REQUIRE(j.size() == 2);
  const double a = 0.11 / 0.89;
  const double g = std::sqrt(a * (2 * a / (1 + a * a)));
  CHECK(j.atoms[0].lr_exact == doctest::Approx(2 * a / (1 + a * a)).epsilon(1e-12));
  CHECK(j.atoms[0].lr_approx == doctest::Approx(g).epsilon(1e-12));
  CHECK(sign_agreement(j).mismatch_mass == 0.0);
}

TEST_CASE("sign_agreement classifies a constructed mixed set") {
  JointLRDistribution j;
  j.atoms = {{0.4, 0.4, 0.3},
             {0.5, 1.0, 0.3},
             {1.0, 1.0, 0.1},
             {2.0, 1.0, 0.15},
             {2.5, 2.5, 0.15}};
  const SignAgreementReport rep = sign_agreement(j);
  CHECK(rep.trapped_mass == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(rep.mismatch_mass == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(rep.per_region_mass[0][0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(rep.per_region_mass[0][1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(rep.per_region_mass[1][1] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(rep.per_region_mass[2][1] == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(rep.per_region_mass[2][2] == doctest::Approx(0.15).epsilon(1e-15));
  double total = 0.0;
  for (const auto& row : rep.per_region_mass)
    for (double v : row) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("marginals of the joint evolution match the direct evolutions") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    LRDistribution d = random_symmetric_distribution(seed);
    LRDistribution exact = d;
    LRDistribution approx = d;
    JointLRDistribution j = lift(d);
    const Branch seq[3] = {Branch::kMinus, Branch::kPlus, Branch::kMinus};
    for (Branch b : seq) {
      j = joint_step(j, b, KernelId::minsum());
      exact = b == Branch::kMinus ? minus_exact(exact) : plus_exact(exact);
      approx = b == Branch::kMinus ? minus_minsum(approx) : plus_exact(approx);
    }
    CHECK(approx_equal(marginal_exact(j), exact, 1e-11, 1e-11));
    CHECK(approx_equal(marginal_approx(j), approx, 1e-11, 1e-11));
  }
}

TEST_CASE("approximate minus counterparts close over the marginal") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    // evolve a couple of min-sum steps first so the law is a genuine
    // approximate-process marginal
    LRDistribution d = minus_minsum(plus_exact(random_symmetric_distribution(seed)));
    const ProbPartition p = prob_partition(d);
    const ProbPartition pm = prob_partition(minus_minsum(d));
    CHECK(std::fabs(pm.p_eq - (2.0 * p.p_eq - p.p_eq * p.p_eq)) < 1e-12);
    CHECK(std::fabs(pm.p_geq_half - 2.0 * p.p_leq_half * p.p_geq_half) < 1e-12);
    CHECK(std::fabs(pm.p_leq_half - (p.p_leq_half * p.p_leq_half +
                                     p.p_geq_half * p.p_geq_half)) < 1e-12);
  }
}

TEST_CASE("the approximation only adds mass at 1") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const LRDistribution d = random_symmetric_distribution(seed);
    JointLRDistribution j = lift(d);
    for (Branch b : {Branch::kMinus, Branch::kPlus, Branch::kMinus}) {
      j = joint_step(j, b, KernelId::minsum());
      const RegionMasses re = region_masses(marginal_exact(j));
      const RegionMasses ra = region_masses(marginal_approx(j));
      CHECK(ra.eq >= re.eq - 1e-12);
    }
  }
}

TEST_CASE("region agreement is closed under the minus branch") {
  // If the regions agree at a node, they agree at its minus child: both
  // kernels share the sign-event algebra.
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    JointLRDistribution j = lift(random_symmetric_distribution(seed));
    for (int step = 0; step < 3; ++step) {
      if (sign_agreement(j).mismatch_mass != 0.0) break;
      const JointLRDistribution jm = joint_step(j, Branch::kMinus, KernelId::minsum());
      CHECK(sign_agreement(jm).mismatch_mass == 0.0);
      j = joint_step(j, Branch::kPlus, KernelId::minsum());
    }
  }
}

TEST_CASE("trapped trajectory on the erasure channel is exactly zero") {
  const TrappedTrajectory t = trapped_mass_trajectory(
      make_bec(0.3), 5, KernelId::minsum(), QuantizationBudget::none());
  for (const auto& level : t.levels)
    for (const auto& node : level) {
      CHECK(node.agreement.mismatch_mass == 0.0);
      CHECK(node.agreement.trapped_mass == 0.0);
    }
  for (const auto& s : t.summary) {
    CHECK(s.max_trapped == 0.0);
    CHECK(s.max_mismatch == 0.0);
  }
}

TEST_CASE("BSC depth-1 children have no sign mismatch") {
  const TrappedTrajectory t = trapped_mass_trajectory(
      make_bsc(0.11), 1, KernelId::minsum(), QuantizationBudget::none());
  REQUIRE(t.levels.size() == 2);
  CHECK(t.levels[1][0].agreement.mismatch_mass == 0.0);
  CHECK(t.levels[1][1].agreement.mismatch_mass == 0.0);
}

TEST_CASE("trapped trajectory is thread-count invariant") {
  const TrappedTrajectory a = trapped_mass_trajectory(
      make_bsc(0.11), 4, KernelId::minsum(), QuantizationBudget::grid(64), 1);
  const TrappedTrajectory b = trapped_mass_trajectory(
      make_bsc(0.11), 4, KernelId::minsum(), QuantizationBudget::grid(64), 4);
  for (std::size_t k = 0; k < a.levels.size(); ++k)
    for (std::size_t i = 0; i < a.levels[k].size(); ++i) {
      CHECK(a.levels[k][i].agreement.trapped_mass ==
            b.levels[k][i].agreement.trapped_mass);
      CHECK(a.levels[k][i].q_approx == b.levels[k][i].q_approx);
    }
}

TEST_CASE("joint quantization keeps both region structures") {
  JointLRDistribution j = lift(make_bsc(0.11));
  for (int step = 0; step < 6; ++step)
    j = joint_step(j, step % 2 ? Branch::kPlus : Branch::kMinus,
                   KernelId::minsum());
  REQUIRE(j.size() > 12);
  const SignAgreementReport before = sign_agreement(j);
  const JointLRDistribution q = quantize_joint(j, QuantizationBudget::grid(12));
  CHECK(q.size() < j.size());
  const SignAgreementReport after = sign_agreement(q);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(after.per_region_mass[a][b] ==
            doctest::Approx(before.per_region_mass[a][b]).epsilon(1e-12));
}
