#pragma once

// Dense vector kernels used by the SVM solver. Each ISA variant lives in its
// own translation unit; the scalar table is the reference implementation.

#include <cstddef>
#include <string_view>

namespace orthomads::simd {

struct KernelTable {
  const char* name;
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // out[i] = ||rows[i * n .. i * n + n) - x||^2 for i < count.
  void (*squared_distance_rows)(const double* rows, std::size_t count, std::size_t n,
                                const double* x, double* out);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += a1 * x1 + a2 * x2
  void (*axpy2)(double a1, const double* x1, double a2, const double* x2, double* y,
                std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when the variant was not compiled in.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Best table supported by this CPU, chosen once. ORTHOMADS_SIMD=scalar
/// forces the reference kernels.
const KernelTable& active_kernels();

}  // namespace orthomads::simd
