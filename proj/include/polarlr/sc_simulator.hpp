// Monte-Carlo successive-cancellation decoding of constructed codes.
//
// Log-ratio convention throughout the decoder: lambda = log(W(y|0)/W(y|1)),
// so positive values favor bit 0. The check node combines
//   exact:   boxplus closed form
//   min-sum: sign(l1*l2) * min(|l1|, |l2|)
// and the variable node is (-1)^u * l1 + l2 with the decided partial sum u.

#pragma once

#include <cstdint>
#include <vector>

#include "polarlr/channel_model.hpp"
#include "polarlr/construction.hpp"
#include "polarlr/transforms.hpp"

namespace polarlr {

// Sampled channel outputs saturate at this log-ratio magnitude.
inline constexpr double kLlrSaturation = 40.0;

// Recursive polar transform x = T(u): the length-2 kernel maps (u1, u2) to
// (u1 ^ u2, u2); block halves follow the same split the decoder walks, so
// decoder bit i corresponds to tree path = binary expansion of i (most
// significant bit first, minus = 0). T is its own inverse.
std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& u);

// Per-symbol channel draw under transmitted bits x; reproducible from seed.
// BEC erasures give 0, otherwise the saturated certainty value; BSC gives
// +/- min(log((1-p)/p), saturation); AWGN gives 2y/sigma^2 clamped.
// Throws for channel specs without a sampling rule (custom, lr).
std::vector<double> sample_output(const ChannelSpec& channel,
                                  const std::vector<std::uint8_t>& x,
                                  std::uint64_t seed);

struct Decision {
  int bit = 0;
  double llr = 0.0;
  std::uint8_t value = 0;
  bool frozen = false;
  bool tie = false;
};

using DecisionLog = std::vector<Decision>;

// Per-index tallies from genie-aided runs (true bits fed back regardless of
// the decision, all-zeros transmission assumed).
struct GenieStats {
  std::vector<long long> erasures;  // leaf llr exactly 0
  std::vector<long long> errors;    // decision differed from the true bit
};

double boxplus_llr(double a, double b);

// Standard depth-first SC decode. Frozen bits decode to 0; lambda = 0 ties
// are broken by a fair coin from the stream (tie_seed, bit index). The
// optional log records every bit decision; the optional genie switches on
// genie-aided mode.
std::vector<std::uint8_t> sc_decode(const std::vector<double>& llr,
                                    const CodeSpec& code, const KernelId& kernel,
                                    std::uint64_t tie_seed = 0,
                                    DecisionLog* log = nullptr,
                                    GenieStats* genie = nullptr);

struct BlerStats {
  long long trials = 0;
  long long block_errors = 0;
  long long bit_errors = 0;
  double bler = 0.0;
  std::uint64_t seed = 0;
};

// All-zeros transmission over `trials` independent channel draws. Per-trial
// randomness is derived from (seed, trial), so the outcome is independent of
// the thread count and of trial execution order.
BlerStats run_bler(const CodeSpec& code, const ChannelSpec& channel,
                   long long trials, const KernelId& kernel, std::uint64_t seed,
                   int threads = 1);

// Genie-aided erasure/error rates per leaf index on an erasure channel.
GenieStats run_genie(const CodeSpec& code, const ChannelSpec& channel,
                     long long trials, const KernelId& kernel,
                     std::uint64_t seed);

}  // namespace polarlr
