// The four check-side transform kernels on likelihood-ratio distributions
// (exact, min-sum, perturbed min-sum -- the variable-side transform is the
// exact product in every case), alphabet quantization, and the brute-force
// transition-matrix oracle the exact kernels are verified against.

#pragma once

#include <string>

#include "polarlr/channel_model.hpp"
#include "polarlr/lr_distribution.hpp"

namespace polarlr {

struct KernelId {
  enum class Tag { kExact, kMinsum, kPerturbed };
  Tag tag = Tag::kExact;
  double gamma = 1.0;  // only meaningful for kPerturbed, in (0, 1]

  static KernelId exact() { return {Tag::kExact, 1.0}; }
  static KernelId minsum() { return {Tag::kMinsum, 1.0}; }
  static KernelId perturbed(double gamma);
};

// Formats as "exact", "minsum", "perturbed:<gamma>"; parse accepts the same.
std::string to_string(const KernelId& k);
KernelId parse_kernel(const std::string& text);

struct QuantizationBudget {
  enum class Mode { kNone, kGrid };
  Mode mode = Mode::kNone;
  int max_atoms = 0;

  static QuantizationBudget none() { return {}; }
  static QuantizationBudget grid(int max_atoms);
};

// Single-pair kernel images in LR domain; the distribution transforms below
// are the pushforwards of these maps over independent pairs.
double minus_exact_image(double l1, double l2);
double minus_minsum_image(double l1, double l2);
double minus_perturbed_image(double l1, double l2, double gamma);

// Distribution of (l1 + l2) / (1 + l1*l2) over independent pairs from d.
LRDistribution minus_exact(const LRDistribution& d);

// Distribution of l1 * l2 over independent pairs from d.
LRDistribution plus_exact(const LRDistribution& d);

// Min-sum image distribution: same-side pairs map to the smaller-magnitude
// value below 1, straddling pairs above 1, a factor of 1 forces 1. Note the
// result is generally not mass-symmetric even for a symmetric input.
LRDistribution minus_minsum(const LRDistribution& d);

// Log-domain geometric interpolation between the min-sum image (gamma -> 0)
// and the exact image (gamma = 1, reproduced atom-exactly).
LRDistribution minus_perturbed(const LRDistribution& d, double gamma);

// Kernel-dispatched check/variable steps used by the evolution engine.
LRDistribution apply_minus(const LRDistribution& d, const KernelId& kernel);
LRDistribution apply_plus(const LRDistribution& d, const KernelId& kernel);

struct QuantizeReport {
  LRDistribution result;
  bool changed = false;
  // Triangle-inequality bounds on the metric movement caused by merging.
  double bound_i = 0.0;
  double bound_z = 0.0;
};

// Region-preserving grid quantization: merges atoms within each side of 1 on
// a uniform grid in |log l| using mass-weighted representatives. Never moves
// mass across the three regions {<1}, {=1}, {>1}, so Q is preserved exactly;
// for symmetric inputs the mass-weighted representative also preserves the
// pair relation. Returns d unchanged when it fits the budget.
LRDistribution quantize(const LRDistribution& d, const QuantizationBudget& b);
QuantizeReport quantize_with_report(const LRDistribution& d,
                                    const QuantizationBudget& b);

enum class Branch { kMinus, kPlus };

// Brute-force channel combining on raw transition matrices:
//   minus: rows (y1, y2),        w_x = sum_u 1/2 W(y1|x ^ u) W(y2|u)
//   plus:  rows (y1, y2, u1),    w_x = 1/2 W(y1|u1 ^ x) W(y2|x)
LRDistribution oracle_combine_lr(const TransitionMatrix& w, Branch branch);
TransitionMatrix oracle_combine(const TransitionMatrix& w, Branch branch);

}  // namespace polarlr
