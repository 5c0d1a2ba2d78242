#include <arm_neon.h>

#include "orthomads/simd/kernels.hpp"

namespace orthomads::simd {
namespace {

double squared_distance(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + j), vld1q_f64(b + j));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; j < n; ++j) {
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
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) acc = vfmaq_f64(acc, vld1q_f64(a + j), vld1q_f64(b + j));
  double s = vaddvq_f64(acc);
  for (; j < n; ++j) s += a[j] * b[j];
  return s;
}

void axpy2(double a1, const double* x1, double a2, const double* x2, double* y, std::size_t n) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    float64x2_t v = vld1q_f64(y + j);
    v = vfmaq_n_f64(v, vld1q_f64(x1 + j), a1);
    v = vfmaq_n_f64(v, vld1q_f64(x2 + j), a2);
    vst1q_f64(y + j, v);
  }
  for (; j < n; ++j) y[j] += a1 * x1[j] + a2 * x2[j];
}

constexpr KernelTable kNeon{"neon", squared_distance, squared_distance_rows, dot, axpy2};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace orthomads::simd
