// Data-parallel inner-loop kernels used by the transforms and the SC decoder.
//
// Every kernel exists in a scalar reference implementation and (on x86-64) an
// AVX2 variant. The two are required to produce bit-identical output: the
// vector variants use only IEEE-exact lane operations (+, *, /, min/max,
// compares, sign-bit logic) and the scalar reference mirrors their selection
// semantics exactly. Equivalence is enforced by tests.

#pragma once

#include <cstddef>
#include <cstdint>

namespace polarlr::simd {

struct KernelTable {
  const char* name;

  // out[i] = (l1 + l2[i]) / (1 + l1 * l2[i])
  void (*check_combine_lr)(double l1, const double* l2, double* out, std::size_t n);

  // out[i] = s * x[i]
  void (*scaled_mul)(double s, const double* x, double* out, std::size_t n);

  // out[i] = 1 / x[i]
  void (*reciprocal)(const double* x, double* out, std::size_t n);

  // Min-magnitude image in LR domain: inputs on the same side of 1 map to the
  // smaller-magnitude value below 1, straddling inputs map above 1, an input
  // equal to 1 forces 1. inv1 = 1/l1 and inv2[i] = 1/l2[i] are precomputed.
  void (*minsum_image_lr)(double l1, double inv1, const double* l2,
                          const double* inv2, double* out, std::size_t n);

  // out[i] = sign(a[i]*b[i]) * min(|a[i]|, |b[i]|)  (log-domain check node)
  void (*minsum_llr)(const double* a, const double* b, double* out, std::size_t n);

  // out[i] = (u[i] ? -a[i] : a[i]) + b[i]  (log-domain variable node)
  void (*sign_flip_add)(const double* a, const double* b, const std::uint8_t* u,
                        double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when AVX2 is unavailable (not compiled in or not supported by the
// CPU at runtime).
const KernelTable* avx2_kernels();

// The dispatch choice: AVX2 when available, unless POLARLR_SIMD=scalar is set
// in the environment (POLARLR_SIMD=avx2 forces AVX2 and throws if missing).
const KernelTable& active_kernels();

}  // namespace polarlr::simd
