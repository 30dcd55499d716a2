#include <bit>
#include <cstdint>

#include "polarlr/simd/kernels.hpp"

namespace polarlr::simd {

namespace {

// Selection semantics deliberately match the AVX2 lane instructions:
// vminpd/vmaxpd(a, b) return b when the operands are equal. All inputs here
// are well-ordered (no NaNs), so only the equal case matters, and there the
// value is the same either way.

inline double min_like(double a, double b) { return a < b ? a : b; }
inline double max_like(double a, double b) { return b < a ? a : b; }

void check_combine_lr_scalar(double l1, const double* l2, double* out,
                             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (l1 + l2[i]) / (1.0 + l1 * l2[i]);
}

void scaled_mul_scalar(double s, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s * x[i];
}

void reciprocal_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / x[i];
}

void minsum_image_lr_scalar(double l1, double inv1, const double* l2,
                            const double* inv2, double* out, std::size_t n) {
  const double t1 = max_like(l1, inv1);
  const double s1 = min_like(l1, inv1);
  for (std::size_t i = 0; i < n; ++i) {
    const double t2 = max_like(l2[i], inv2[i]);
    const double s2 = min_like(l2[i], inv2[i]);
    const bool pick1 = t1 <= t2;
    const double small = pick1 ? s1 : s2;
    const double big = pick1 ? t1 : t2;
    const bool same_side = (l1 < 1.0) == (l2[i] < 1.0);
    double r = same_side ? small : big;
    if (l1 == 1.0 || l2[i] == 1.0) r = 1.0;
    out[i] = r;
  }
}

void minsum_llr_scalar(const double* a, const double* b, double* out,
                       std::size_t n) {
  constexpr std::uint64_t kSignMask = 0x8000000000000000ULL;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t ba = std::bit_cast<std::uint64_t>(a[i]);
    const std::uint64_t bb = std::bit_cast<std::uint64_t>(b[i]);
    const double fa = std::bit_cast<double>(ba & ~kSignMask);
    const double fb = std::bit_cast<double>(bb & ~kSignMask);
    const double mag = min_like(fa, fb);
    const std::uint64_t sign = (ba ^ bb) & kSignMask;
    out[i] = std::bit_cast<double>(std::bit_cast<std::uint64_t>(mag) | sign);
  }
}

void sign_flip_add_scalar(const double* a, const double* b,
                          const std::uint8_t* u, double* out, std::size_t n) {
  constexpr std::uint64_t kSignMask = 0x8000000000000000ULL;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t flip = u[i] ? kSignMask : 0;
    const double av =
        std::bit_cast<double>(std::bit_cast<std::uint64_t>(a[i]) ^ flip);
    out[i] = av + b[i];
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table = {
      "scalar",
      &check_combine_lr_scalar,
      &scaled_mul_scalar,
      &reciprocal_scalar,
      &minsum_image_lr_scalar,
      &minsum_llr_scalar,
      &sign_flip_add_scalar,
  };
  return table;
}

}  // namespace polarlr::simd
