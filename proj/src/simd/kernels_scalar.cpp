#include "orthomads/simd/kernels.hpp"

namespace orthomads::simd {
namespace {

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

void squared_distance_rows(const double* rows, std::size_t count, std::size_t n, const double* x,
                           double* out) {
  for (std::size_t i = 0; i < count; ++i) out[i] = squared_distance(rows + i * n, x, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += a[j] * b[j];
  return s;
}

void axpy2(double a1, const double* x1, double a2, const double* x2, double* y, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) y[j] += a1 * x1[j] + a2 * x2[j];
}

constexpr KernelTable kScalar{"scalar", squared_distance, squared_distance_rows, dot, axpy2};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace orthomads::simd
