#include <cstdlib>
#include <string_view>

#include "orthomads/simd/kernels.hpp"

namespace orthomads::simd {

#ifndef ORTHOMADS_HAVE_AVX2_TU
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#ifndef ORTHOMADS_HAVE_NEON_TU
const KernelTable* neon_kernels() { return nullptr; }
#endif

namespace {

const KernelTable& select() {
  const char* env = std::getenv("ORTHOMADS_SIMD");
  if (env && std::string_view(env) == "scalar") return scalar_kernels();
#if defined(ORTHOMADS_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return *avx2_kernels();
#endif
#if defined(ORTHOMADS_HAVE_NEON_TU)
  return *neon_kernels();
#endif
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace orthomads::simd
