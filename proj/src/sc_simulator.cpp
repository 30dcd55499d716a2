#include "polarlr/sc_simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <stdexcept>

#include "polarlr/rng.hpp"
#include "polarlr/simd/kernels.hpp"

namespace polarlr {

std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& u) {
  const std::size_t n = u.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("encode: length must be a power of two");
  std::vector<std::uint8_t> x = u;
  // Iterative form of x[0:h] = T(s ^ t), x[h:] = T(t): xor the second half
  // into the first at every block size, largest first.
  for (std::size_t h = n / 2; h >= 1; h /= 2)
    for (std::size_t base = 0; base < n; base += 2 * h)
      for (std::size_t i = 0; i < h; ++i)
        x[base + i] = static_cast<std::uint8_t>(x[base + i] ^ x[base + h + i]);
  return x;
}

double boxplus_llr(double a, double b) {
  // Sign-magnitude evaluation: the magnitude is a function of |a|, |b| only,
  // which makes the kernel exactly odd in each argument. Exact cancellations
  // at the variable nodes then reproduce the tie events of the synthetic
  // channel (an expression mixing signed sums would break ties by rounding
  // noise instead).
  const double x = std::fabs(a);
  const double y = std::fabs(b);
  const double lo = x < y ? x : y;
  const double mag = lo + std::log1p(std::exp(-(x + y))) -
                     std::log1p(std::exp(-std::fabs(x - y)));
  constexpr std::uint64_t kSignMask = 0x8000000000000000ULL;
  const std::uint64_t sign = (std::bit_cast<std::uint64_t>(a) ^
                              std::bit_cast<std::uint64_t>(b)) &
                             kSignMask;
  return std::bit_cast<double>(std::bit_cast<std::uint64_t>(mag) | sign);
}

std::vector<double> sample_output(const ChannelSpec& channel,
                                  const std::vector<std::uint8_t>& x,
                                  std::uint64_t seed) {
  if (!channel.samplable())
    throw std::invalid_argument(
        "sample_output: channel type has no per-symbol sampling rule");
  Rng rng(mix_seed(seed, 0xCAB1E5));
  std::vector<double> llr(x.size());
  switch (channel.type) {
    case ChannelSpec::Type::kBec: {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const bool erased = rng.next_double() < channel.eps;
        llr[i] = erased ? 0.0 : (x[i] ? -kLlrSaturation : kLlrSaturation);
      }
      break;
    }
    case ChannelSpec::Type::kBsc: {
      const double p = channel.p;
      const double mag =
          p > 0.0 ? std::min(std::log((1.0 - p) / p), kLlrSaturation)
                  : kLlrSaturation;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const bool flip = rng.next_double() < p;
        const std::uint8_t y = static_cast<std::uint8_t>(x[i] ^ (flip ? 1 : 0));
        llr[i] = y ? -mag : mag;
      }
      break;
    }
    case ChannelSpec::Type::kAwgn: {
      const double sigma = channel.sigma;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = x[i] ? -1.0 : 1.0;
        const double y = s + sigma * rng.next_normal();
        llr[i] = std::clamp(2.0 * y / (sigma * sigma), -kLlrSaturation,
                            kLlrSaturation);
      }
      break;
    }
    default:
      break;
  }
  return llr;
}

namespace {

class ScDecoder {
 public:
  ScDecoder(const CodeSpec& code, const KernelId& kernel)
      : code_(code),
        minsum_(kernel.tag != KernelId::Tag::kExact),
        n_(code.block_length) {
    if (n_ <= 0 || (n_ & (n_ - 1)) != 0)
      throw std::invalid_argument("sc_decode: block length must be a power of two");
    frozen_.assign(static_cast<std::size_t>(n_), 1);
    for (int i : code_.info_set) frozen_[static_cast<std::size_t>(i)] = 0;
    int levels = 0;
    while ((1 << levels) < n_) ++levels;
    lbuf_.resize(static_cast<std::size_t>(levels));
    xbuf_.resize(static_cast<std::size_t>(levels));
    for (int k = 0; k < levels; ++k) {
      lbuf_[static_cast<std::size_t>(k)].resize(
          static_cast<std::size_t>(n_ >> (k + 1)));
      xbuf_[static_cast<std::size_t>(k)].resize(
          static_cast<std::size_t>(n_ >> (k + 1)));
    }
  }

  std::vector<std::uint8_t> decode(const std::vector<double>& llr,
                                   std::uint64_t tie_seed, DecisionLog* log,
                                   GenieStats* genie) {
    if (static_cast<int>(llr.size()) != n_)
      throw std::invalid_argument("sc_decode: llr length mismatch");
    u_.assign(static_cast<std::size_t>(n_), 0);
    tie_seed_ = tie_seed;
    log_ = log;
    genie_ = genie;
    std::vector<std::uint8_t> codeword(static_cast<std::size_t>(n_));
    decode_node(llr.data(), codeword.data(), static_cast<std::size_t>(n_), 0, 0);
    return u_;
  }

 private:
  void decide_leaf(double lambda, std::uint8_t* xhat, int bit) {
    std::uint8_t value = 0;
    bool tie = false;
    const bool is_frozen = frozen_[static_cast<std::size_t>(bit)] != 0;
    if (!is_frozen || genie_) {
      if (lambda > 0.0) {
        value = 0;
      } else if (lambda < 0.0) {
        value = 1;
      } else {
        tie = true;
        value = static_cast<std::uint8_t>(
            mix_seed(tie_seed_, 0x7e11c01, static_cast<std::uint64_t>(bit)) & 1u);
      }
    }
    if (is_frozen && !genie_) value = 0;
    if (log_) log_->push_back({bit, lambda, value, is_frozen, tie});
    if (genie_) {
      genie_->erasures[static_cast<std::size_t>(bit)] += lambda == 0.0 ? 1 : 0;
      genie_->errors[static_cast<std::size_t>(bit)] += value != 0 ? 1 : 0;
      value = 0;  // all-zeros truth fed back
    }
    u_[static_cast<std::size_t>(bit)] = value;
    *xhat = value;
  }

  void decode_node(const double* lambda, std::uint8_t* xhat, std::size_t len,
                   int bit_base, int level) {
    if (len == 1) {
      decide_leaf(lambda[0], xhat, bit_base);
      return;
    }
    const std::size_t half = len / 2;
    double* work = lbuf_[static_cast<std::size_t>(level)].data();
    std::uint8_t* xf = xbuf_[static_cast<std::size_t>(level)].data();
    const auto& kern = simd::active_kernels();

    if (minsum_) {
      kern.minsum_llr(lambda, lambda + half, work, half);
    } else {
      for (std::size_t i = 0; i < half; ++i)
        work[i] = boxplus_llr(lambda[i], lambda[half + i]);
    }
    decode_node(work, xf, half, bit_base, level + 1);

    kern.sign_flip_add(lambda, lambda + half, xf, work, half);
    decode_node(work, xhat + half, half, bit_base + static_cast<int>(half),
                level + 1);

    for (std::size_t i = 0; i < half; ++i)
      xhat[i] = static_cast<std::uint8_t>(xf[i] ^ xhat[half + i]);
  }

  const CodeSpec& code_;
  bool minsum_;
  int n_;
  std::vector<std::uint8_t> frozen_;
  std::vector<std::uint8_t> u_;
  std::vector<std::vector<double>> lbuf_;
  std::vector<std::vector<std::uint8_t>> xbuf_;
  std::uint64_t tie_seed_ = 0;
  DecisionLog* log_ = nullptr;
  GenieStats* genie_ = nullptr;
};

}  // namespace

std::vector<std::uint8_t> sc_decode(const std::vector<double>& llr,
                                    const CodeSpec& code, const KernelId& kernel,
                                    std::uint64_t tie_seed, DecisionLog* log,
                                    GenieStats* genie) {
  ScDecoder decoder(code, kernel);
  return decoder.decode(llr, tie_seed, log, genie);
}

BlerStats run_bler(const CodeSpec& code, const ChannelSpec& channel,
                   long long trials, const KernelId& kernel, std::uint64_t seed,
                   int threads) {
  if (trials < 1) throw std::domain_error("run_bler: trials must be >= 1");
  const std::vector<std::uint8_t> x(static_cast<std::size_t>(code.block_length), 0);

  const auto run_range = [&](long long lo, long long hi) {
    ScDecoder decoder(code, kernel);
    std::pair<long long, long long> acc{0, 0};  // block, bit
    for (long long t = lo; t < hi; ++t) {
      const auto llr =
          sample_output(channel, x, mix_seed(seed, static_cast<std::uint64_t>(t)));
      const auto u = decoder.decode(
          llr, mix_seed(seed, static_cast<std::uint64_t>(t), 0x7135), nullptr,
          nullptr);
      long long bits = 0;
      for (int i : code.info_set) bits += u[static_cast<std::size_t>(i)] != 0;
      acc.first += bits > 0 ? 1 : 0;
      acc.second += bits;
    }
    return acc;
  };

  BlerStats stats;
  stats.trials = trials;
  stats.seed = seed;
  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    const auto acc = run_range(0, trials);
    stats.block_errors = acc.first;
    stats.bit_errors = acc.second;
  } else {
    std::vector<std::future<std::pair<long long, long long>>> futures;
    const long long chunk = (trials + nthreads - 1) / nthreads;
    for (long long lo = 0; lo < trials; lo += chunk) {
      const long long hi = std::min(trials, lo + chunk);
      futures.push_back(std::async(std::launch::async,
                                   [lo, hi, &run_range] { return run_range(lo, hi); }));
    }
    for (auto& f : futures) {
      const auto acc = f.get();
      stats.block_errors += acc.first;
      stats.bit_errors += acc.second;
    }
  }
  stats.bler = static_cast<double>(stats.block_errors) /
               static_cast<double>(stats.trials);
  return stats;
}

GenieStats run_genie(const CodeSpec& code, const ChannelSpec& channel,
                     long long trials, const KernelId& kernel,
                     std::uint64_t seed) {
  GenieStats stats;
  stats.erasures.assign(static_cast<std::size_t>(code.block_length), 0);
  stats.errors.assign(static_cast<std::size_t>(code.block_length), 0);
  const std::vector<std::uint8_t> x(static_cast<std::size_t>(code.block_length), 0);
  ScDecoder decoder(code, kernel);
  for (long long t = 0; t < trials; ++t) {
    const auto llr =
        sample_output(channel, x, mix_seed(seed, static_cast<std::uint64_t>(t)));
    decoder.decode(llr, mix_seed(seed, static_cast<std::uint64_t>(t), 0x7135),
                   nullptr, &stats);
  }
  return stats;
}

}  // namespace polarlr
