// Scalar channel parameters of a likelihood-ratio distribution: symmetric
// capacity I, Bhattacharyya parameter Z, the supermartingale coordinate
// Q = P[L<1] - P[L>1], the three region masses, the half-mass probabilities
// that split P[L=1] evenly, and the ML error probability under the all-zeros
// input.

#pragma once

#include <string>

#include "polarlr/lr_distribution.hpp"

namespace polarlr {

struct ChannelMetrics {
  double i = 0.0;
  double z = 0.0;
  double q = 0.0;
  double p_less = 0.0;
  double p_eq = 0.0;
  double p_greater = 0.0;
  double p_geq_half = 0.0;  // P[L > 1] + P[L = 1]/2
  double p_leq_half = 0.0;  // P[L < 1] + P[L = 1]/2
  double pe = 0.0;          // equals p_geq_half
};

struct ProbPartition {
  double p_less = 0.0;
  double p_eq = 0.0;
  double p_greater = 0.0;
  double p_geq_half = 0.0;
  double p_leq_half = 0.0;
};

ProbPartition prob_partition(const LRDistribution& d);

// Q = P[L < 1] - P[L > 1].
double q_param(const LRDistribution& d);

// Z = sum over atoms of mass * sqrt(lr).
double bhattacharyya(const LRDistribution& d);

// I = sum over atoms of mass * (1 - log2(1 + lr)), in bits.
double sym_capacity(const LRDistribution& d);

ChannelMetrics channel_metrics(const LRDistribution& d);

enum class LimitClass { kPerfect, kNoisy, kModerate, kUndecided };

// Places a channel in the limit taxonomy on the (Q, P[L=1]) plane:
// perfect when Q >= 1-delta, noisy when P[L=1] >= 1-delta, moderate (the
// anomalous corner) when both Q and P[L=1] are at most delta.
LimitClass classify_limit(const LRDistribution& d, double delta);

std::string to_string(LimitClass c);

}  // namespace polarlr
