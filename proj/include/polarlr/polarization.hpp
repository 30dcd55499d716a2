// Evolution of a root channel through the polarization tree: full 2^n
// enumeration with per-node records, seeded single-path sampling, one-step
// verification of the transform inequalities, and level aggregates for the
// martingale trends.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polarlr/lr_distribution.hpp"
#include "polarlr/metrics.hpp"
#include "polarlr/transforms.hpp"

namespace polarlr {

// Node address in the tree: bits are most-significant-first, minus = 0.
struct PathIndex {
  int depth = 0;
  std::uint32_t index = 0;

  Branch bit(int level) const {
    return ((index >> (depth - 1 - level)) & 1u) ? Branch::kPlus : Branch::kMinus;
  }
  std::string bit_string() const;
};

struct SyntheticChannelRecord {
  PathIndex path;
  ChannelMetrics metrics;
  int atom_count = 0;
  bool quantized = false;
};

struct PropositionReport {
  bool prop1_ok = false;
  bool prop2_ok = false;
  bool prop3_ok = false;
  bool prop4_ok = false;
  // Worst slack per proposition, normalized so that ok <=> margin >= -1e-10
  // (the Q-square equality check carries its own 1e-12 tolerance inside).
  double margin1 = 0.0;
  double margin2 = 0.0;
  double margin3 = 0.0;
  double margin4 = 0.0;
  std::vector<std::string> details;  // violated inequalities with values

  bool all_ok() const { return prop1_ok && prop2_ok && prop3_ok && prop4_ok; }
};

inline constexpr double kPropositionTolerance = 1e-10;
inline constexpr double kQSquareTolerance = 1e-12;

// One-step checks against the given kernel's children (the variable side is
// always the exact product):
//   1. half-mass sandwich between the two children
//   2. children keep P[>1] <= P[<1]
//   3. the five averaged inequalities
//   4. Q_minus = Q^2 (1e-12) and Q <= Q_plus <= 2Q - Q^2 (1e-10)
// Throws when the parent violates P[>1] <= P[<1].
PropositionReport verify_propositions(const LRDistribution& parent,
                                      const KernelId& kernel);

struct EvolveOptions {
  KernelId kernel = KernelId::exact();
  QuantizationBudget budget = QuantizationBudget::none();
  int threads = 1;
  bool keep_leaf_distributions = false;
};

struct TreeResult {
  int depth = 0;
  // levels[k][i]: record of the node at level k, path index i.
  std::vector<std::vector<SyntheticChannelRecord>> levels;
  std::vector<LRDistribution> leaf_distributions;  // when requested

  const std::vector<SyntheticChannelRecord>& leaves() const {
    return levels.back();
  }
};

// Full deterministic enumeration of all 2^depth paths. Sibling subtrees may
// evolve on separate threads; all records land in index-addressed slots, so
// the result is identical for every thread count.
TreeResult evolve_tree(const LRDistribution& root, int depth,
                       const EvolveOptions& options);

struct PathSample {
  PathIndex path;
  ChannelMetrics metrics;
};

// One uniformly random root-to-leaf trajectory, reproducible from the seed;
// returns depth+1 entries including the root.
std::vector<PathSample> sample_path(const LRDistribution& root, int depth,
                                    const KernelId& kernel,
                                    const QuantizationBudget& budget,
                                    std::uint64_t seed);

struct LevelAggregate {
  int level = 0;
  double mean_q = 0.0;
  double mean_p_geq = 0.0;
  double mean_p_leq = 0.0;
  double mean_p_eq = 0.0;
  double mean_i = 0.0;
  double mean_z = 0.0;
  double mean_q_one_minus_q = 0.0;
  // E|Q_k - Q_{k-1}| over the edges entering this level; 0 at the root.
  double mean_abs_dq = 0.0;
  double fraction_perfect = 0.0;  // classify_limit at delta = 0.01
  double fraction_moderate = 0.0;
};

struct MartingaleReport {
  std::vector<LevelAggregate> levels;
  bool mean_q_non_increasing = false;
  bool mean_p_geq_non_decreasing = false;
  bool mean_p_eq_non_decreasing = false;
  bool mean_p_leq_non_increasing = false;
  double worst_monotonicity_violation = 0.0;
  double worst_i_drift = 0.0;  // max_k |E_k[I] - E_0[I]|

  bool monotone_ok() const {
    return mean_q_non_increasing && mean_p_geq_non_decreasing &&
           mean_p_eq_non_decreasing && mean_p_leq_non_increasing;
  }
};

MartingaleReport martingale_report(const LRDistribution& root, int depth,
                                   const EvolveOptions& options);
MartingaleReport aggregate_levels(const TreeResult& tree);

}  // namespace polarlr
