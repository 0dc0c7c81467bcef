// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "jbfmc/kernels.hpp"

namespace jbfmc::simd {

#if defined(JBFMC_HAVE_AVX2_TU)
const KernelTable &avx2_kernel_table();
#endif

const KernelTable *avx2_kernels() {
#if defined(JBFMC_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable &active_kernels() {
  static const KernelTable &table = [&]() -> const KernelTable & {
    const char *env = std::getenv("JBFMC_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelTable *fast = avx2_kernels()) return *fast;
    return scalar_kernels();
  }();
  return table;
}

} // namespace jbfmc::simd
