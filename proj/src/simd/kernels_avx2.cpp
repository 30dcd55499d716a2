// AVX2 variants of the inner-loop kernels. Lane arithmetic is restricted to
// IEEE-exact operations so results match the scalar reference bit for bit;
// tails shorter than a vector fall through to the same scalar expressions.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>
#include <cstdint>

#include "polarlr/simd/kernels.hpp"

namespace polarlr::simd {

namespace {

constexpr std::uint64_t kSignMask = 0x8000000000000000ULL;

inline double min_like(double a, double b) { return a < b ? a : b; }
inline double max_like(double a, double b) { return b < a ? a : b; }

void check_combine_lr_avx2(double l1, const double* l2, double* out,
                           std::size_t n) {
  const __m256d v1 = _mm256_set1_pd(l1);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v2 = _mm256_loadu_pd(l2 + i);
    const __m256d num = _mm256_add_pd(v1, v2);
    const __m256d den = _mm256_add_pd(one, _mm256_mul_pd(v1, v2));
    _mm256_storeu_pd(out + i, _mm256_div_pd(num, den));
  }
  for (; i < n; ++i) out[i] = (l1 + l2[i]) / (1.0 + l1 * l2[i]);
}

void scaled_mul_avx2(double s, const double* x, double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = s * x[i];
}

void reciprocal_avx2(const double* x, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_div_pd(one, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = 1.0 / x[i];
}

void minsum_image_lr_avx2(double l1, double inv1, const double* l2,
                          const double* inv2, double* out, std::size_t n) {
  const double t1s = max_like(l1, inv1);
  const double s1s = min_like(l1, inv1);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vt1 = _mm256_set1_pd(t1s);
  const __m256d vs1 = _mm256_set1_pd(s1s);
  const __m256d side1 =
      _mm256_set1_pd(std::bit_cast<double>(l1 < 1.0 ? ~0ULL : 0ULL));
  const bool l1_is_one = l1 == 1.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v2 = _mm256_loadu_pd(l2 + i);
    const __m256d w2 = _mm256_loadu_pd(inv2 + i);
    const __m256d t2 = _mm256_max_pd(v2, w2);
    const __m256d s2 = _mm256_min_pd(v2, w2);
    const __m256d pick1 = _mm256_cmp_pd(vt1, t2, _CMP_LE_OQ);
    const __m256d small = _mm256_blendv_pd(s2, vs1, pick1);
    const __m256d big = _mm256_blendv_pd(t2, vt1, pick1);
    const __m256d side2 = _mm256_cmp_pd(v2, one, _CMP_LT_OQ);
    // same side <=> the two side masks agree
    const __m256d diff = _mm256_xor_pd(side1, side2);
    __m256d r = _mm256_blendv_pd(small, big, diff);
    const __m256d eq2 = _mm256_cmp_pd(v2, one, _CMP_EQ_OQ);
    r = _mm256_blendv_pd(r, one, eq2);
    if (l1_is_one) r = one;
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) {
    const double t2 = max_like(l2[i], inv2[i]);
    const double s2 = min_like(l2[i], inv2[i]);
    const bool pick1 = t1s <= t2;
    const double small = pick1 ? s1s : s2;
    const double big = pick1 ? t1s : t2;
    const bool same_side = (l1 < 1.0) == (l2[i] < 1.0);
    double r = same_side ? small : big;
    if (l1_is_one || l2[i] == 1.0) r = 1.0;
    out[i] = r;
  }
}

void minsum_llr_avx2(const double* a, const double* b, double* out,
                     std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(std::bit_cast<double>(kSignMask));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d fa = _mm256_andnot_pd(sign_mask, va);
    const __m256d fb = _mm256_andnot_pd(sign_mask, vb);
    const __m256d mag = _mm256_min_pd(fa, fb);
    const __m256d sign = _mm256_and_pd(_mm256_xor_pd(va, vb), sign_mask);
    _mm256_storeu_pd(out + i, _mm256_or_pd(mag, sign));
  }
  for (; i < n; ++i) {
    const std::uint64_t ba = std::bit_cast<std::uint64_t>(a[i]);
    const std::uint64_t bb = std::bit_cast<std::uint64_t>(b[i]);
    const double fa = std::bit_cast<double>(ba & ~kSignMask);
    const double fb = std::bit_cast<double>(bb & ~kSignMask);
    const double mag = min_like(fa, fb);
    out[i] = std::bit_cast<double>(std::bit_cast<std::uint64_t>(mag) |
                                   ((ba ^ bb) & kSignMask));
  }
}

void sign_flip_add_avx2(const double* a, const double* b,
                        const std::uint8_t* u, double* out, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  const __m256d sign_mask = _mm256_set1_pd(std::bit_cast<double>(kSignMask));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    std::uint32_t packed;
    __builtin_memcpy(&packed, u + i, 4);
    const __m256i lanes =
        _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(packed)));
    const __m256i nz = _mm256_cmpgt_epi64(lanes, zero);
    const __m256d flip = _mm256_and_pd(_mm256_castsi256_pd(nz), sign_mask);
    const __m256d va = _mm256_xor_pd(_mm256_loadu_pd(a + i), flip);
    _mm256_storeu_pd(out + i, _mm256_add_pd(va, _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) {
    const std::uint64_t flip = u[i] ? kSignMask : 0;
    const double av =
        std::bit_cast<double>(std::bit_cast<std::uint64_t>(a[i]) ^ flip);
    out[i] = av + b[i];
  }
}

}  // namespace

const KernelTable* avx2_table_impl() {
  static const KernelTable table = {
      "avx2",
      &check_combine_lr_avx2,
      &scaled_mul_avx2,
      &reciprocal_avx2,
      &minsum_image_lr_avx2,
      &minsum_llr_avx2,
      &sign_flip_add_avx2,
  };
  return &table;
}

}  // namespace polarlr::simd

#endif  // x86-64
