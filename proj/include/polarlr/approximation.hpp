// Joint evolution of the exact likelihood ratio and its approximation over
// the same outputs. This is what quantifies the divergence the approximate
// kernels introduce: mass whose approximate ratio sits in a different region
// of 1 than the exact ratio, and in particular mass trapped at exactly 1.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "polarlr/lr_distribution.hpp"
#include "polarlr/polarization.hpp"
#include "polarlr/transforms.hpp"

namespace polarlr {

struct JointLRAtom {
  double lr_exact = 0.0;
  double lr_approx = 0.0;
  double mass = 0.0;
};

struct JointLRDistribution {
  std::vector<JointLRAtom> atoms;  // sorted by (lr_exact, lr_approx)
  double tolerance = kDefaultTolerance;

  std::size_t size() const { return atoms.size(); }
  double mass_sum() const;
};

// Diagonal embedding: at depth 0 the approximate process equals the exact one.
JointLRDistribution lift(const LRDistribution& d);

LRDistribution marginal_exact(const JointLRDistribution& j);
LRDistribution marginal_approx(const JointLRDistribution& j);

// One combining step on the joint law. The exact coordinate always follows
// the exact recursion; the approximate coordinate follows `approx` (min-sum
// or perturbed) on the check side and the exact product on the variable side.
JointLRDistribution joint_step(const JointLRDistribution& j, Branch branch,
                               const KernelId& approx);

struct SignAgreementReport {
  double mismatch_mass = 0.0;  // regions of exact and approx disagree
  double trapped_mass = 0.0;   // approx at 1 while exact is not
  // per_region_mass[a][b]: exact region a, approx region b, in the order
  // {<1}, {=1}, {>1}.
  std::array<std::array<double, 3>, 3> per_region_mass{};
};

SignAgreementReport sign_agreement(const JointLRDistribution& j);

// Region-preserving quantization of the joint law: bins on the exact
// coordinate (grid in |log l|), keeps the approximate coordinate's region, and
// carries mass-weighted representatives on both coordinates.
JointLRDistribution quantize_joint(const JointLRDistribution& j,
                                   const QuantizationBudget& b);

struct JointNodeReport {
  PathIndex path;
  SignAgreementReport agreement;
  double p_eq_exact = 0.0;
  double p_eq_approx = 0.0;
  double q_exact = 0.0;
  double q_approx = 0.0;
  int atom_count = 0;
  bool quantized = false;
};

struct JointLevelSummary {
  int level = 0;
  double max_trapped = 0.0;
  double mean_trapped = 0.0;
  double max_mismatch = 0.0;
  double mean_mismatch = 0.0;
};

struct TrappedTrajectory {
  int depth = 0;
  std::vector<std::vector<JointNodeReport>> levels;
  std::vector<JointLevelSummary> summary;
};

// Joint evolution down every path of the depth-n tree with a
// SignAgreementReport per node.
TrappedTrajectory trapped_mass_trajectory(const LRDistribution& root, int depth,
                                          const KernelId& approx,
                                          const QuantizationBudget& budget,
                                          int threads = 1);

}  // namespace polarlr
