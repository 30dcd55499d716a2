// Test-side oracles, independent of the library's computation paths.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "polarlr/channel_model.hpp"

namespace test_oracles {

// Symmetric capacity straight from the transition matrix by the defining
// double sum (base-2), independent of the LR-domain closed form.
inline double capacity_double_sum(const polarlr::TransitionMatrix& w) {
  double i = 0.0;
  for (const auto& [w0, w1] : w.rows) {
    const double mix = 0.5 * (w0 + w1);
    if (w0 > 0.0) i += 0.5 * w0 * std::log2(w0 / mix);
    if (w1 > 0.0) i += 0.5 * w1 * std::log2(w1 / mix);
  }
  return i;
}

// Capacity of binary-input AWGN (BPSK +-1, noise sigma) by Simpson quadrature
// of I = 1 - E[log2(1 + exp(-2y/sigma^2))], y ~ N(1, sigma^2).
inline double awgn_capacity_quadrature(double sigma) {
  const double lo = 1.0 - 12.0 * sigma;
  const double hi = 1.0 + 12.0 * sigma;
  const int n = 200001;  // odd
  const double h = (hi - lo) / (n - 1);
  const double inv_s2 = 1.0 / (sigma * sigma);
  const auto f = [&](double y) {
    const double pdf = std::exp(-0.5 * (y - 1.0) * (y - 1.0) * inv_s2) /
                       (sigma * std::sqrt(2.0 * M_PI));
    const double t = -2.0 * y * inv_s2;
    // log2(1 + e^t) evaluated stably
    const double l2 = t > 40.0 ? t / std::log(2.0)
                               : std::log1p(std::exp(std::min(t, 40.0))) /
                                     std::log(2.0);
    return pdf * l2;
  };
  double acc = f(lo) + f(hi);
  for (int k = 1; k < n - 1; ++k) acc += f(lo + k * h) * (k % 2 ? 4.0 : 2.0);
  return 1.0 - acc * h / 3.0;
}

// Erasure probability of the BEC leaf at `index` (most significant bit first,
// minus = 0) by the closed-form recursion.
inline double bec_leaf_eps(double eps, std::uint32_t index, int depth) {
  double e = eps;
  for (int k = depth - 1; k >= 0; --k) {
    const bool plus = (index >> k) & 1u;
    e = plus ? e * e : 2.0 * e - e * e;
  }
  return e;
}

// |phat - p| within nsig binomial standard deviations over n trials.
inline bool binomial_within(double phat, double p, long long n, double nsig) {
  const double sd = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
  return std::fabs(phat - p) <= nsig * sd;
}

}  // namespace test_oracles
