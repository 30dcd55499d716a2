#include <cstdlib>
#include <stdexcept>
#include <string>

#include "polarlr/simd/kernels.hpp"

namespace polarlr::simd {

#if defined(POLARLR_HAVE_AVX2_TU)
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_kernels() {
#if defined(POLARLR_HAVE_AVX2_TU)
  if (__builtin_cpu_supports("avx2")) return avx2_table_impl();
#endif
  return nullptr;
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = [&]() -> const KernelTable& {
    const char* env = std::getenv("POLARLR_SIMD");
    const std::string mode = env ? env : "auto";
    if (mode == "scalar") return scalar_kernels();
    const KernelTable* avx2 = avx2_kernels();
    if (mode == "avx2") {
      if (!avx2) throw std::runtime_error("POLARLR_SIMD=avx2: AVX2 unavailable");
      return *avx2;
    }
    return avx2 ? *avx2 : scalar_kernels();
  }();
  return chosen;
}

}  // namespace polarlr::simd
