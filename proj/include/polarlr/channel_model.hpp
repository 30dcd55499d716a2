// Builders and validation for symmetric binary-input channels, expressed as
// likelihood-ratio distributions, plus the raw transition-matrix form used by
// the brute-force oracle.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "polarlr/lr_distribution.hpp"

namespace polarlr {

// One output symbol per row: (W(y|0), W(y|1)).
struct TransitionMatrix {
  std::vector<std::pair<double, double>> rows;
  double tolerance = kDefaultTolerance;
};

// Throws if columns do not sum to 1, a row is degenerate (both entries zero),
// or no output involution pairs rows with swapped entries within tolerance;
// the symmetry error names the worst-offending row pair.
void validate_transition_matrix(const TransitionMatrix& w);

// Binary symmetric channel, crossover p in [0, 0.5]. p above 0.5 is rejected:
// it would put more likelihood-ratio mass above 1 than below.
LRDistribution make_bsc(double p);

// Binary erasure channel, erasure probability eps in [0, 1].
LRDistribution make_bec(double eps);

// Binary-input AWGN (BPSK, noise deviation sigma) discretized to at most
// 2*levels atoms: the positive half of the log-LR axis is split into uniform
// bins, each bin keeps its conditional mass and its mass-weighted mean LR, and
// the negative half is the exact symmetric mirror.
LRDistribution make_awgn_quantized(double sigma, int levels);

// Groups outputs of a validated symmetric matrix by their likelihood ratio.
// Outputs with W(y|0) = 0 carry no mass under the all-zeros input and are
// dropped.
LRDistribution from_transition_matrix(const TransitionMatrix& w);

// Renders a symmetric distribution back to matrix form: one row (m, l*m) per
// atom, plus the mirror row (0, m) when an atom at l = 0 exists.
TransitionMatrix render_transition_matrix(const LRDistribution& d);

// Parsed form of the channel spec files the CLI consumes.
struct ChannelSpec {
  enum class Type { kBsc, kBec, kAwgn, kCustom, kLr };
  Type type = Type::kBec;
  double p = 0.0;      // bsc
  double eps = 0.0;    // bec
  double sigma = 1.0;  // awgn
  int levels = 0;      // awgn
  TransitionMatrix rows;       // custom
  std::vector<LRAtom> atoms;   // lr

  LRDistribution to_distribution() const;
  // Only the parametric families can be sampled symbol by symbol.
  bool samplable() const {
    return type == Type::kBsc || type == Type::kBec || type == Type::kAwgn;
  }
};

// Random symmetric distribution for property tests and the verification CLI:
// 1-4 below-1 atoms at log-uniform positions with their exact mirror partners,
// optional mass at 1 and at 0, atom count in [2, 10]. Deterministic in seed.
LRDistribution random_symmetric_distribution(std::uint64_t seed);

// Random symmetric transition matrix with at most max_outputs outputs
// (swapped-entry row pairs plus an optional self-paired row).
TransitionMatrix random_symmetric_matrix(std::uint64_t seed, int max_outputs);

}  // namespace polarlr
