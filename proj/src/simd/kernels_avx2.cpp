#include <immintrin.h>

#include "orthomads/simd/kernels.hpp"

namespace orthomads::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + j + 4), _mm256_loadu_pd(b + j + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; j + 4 <= n; j += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

void squared_distance_rows(const double* rows, std::size_t count, std::size_t n, const double* x,
                           double* out) {
  if (n == 2) {
    // Two features per row: handle two rows per 256-bit register.
    const __m256d xx = _mm256_setr_pd(x[0], x[1], x[0], x[1]);
    std::size_t i = 0;
    for (; i + 2 <= count; i += 2) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(rows + 2 * i), xx);
      const __m256d sq = _mm256_mul_pd(d, d);
      const __m256d pair = _mm256_hadd_pd(sq, sq);
      out[i] = _mm256_cvtsd_f64(pair);
      out[i + 1] = _mm_cvtsd_f64(_mm256_extractf128_pd(pair, 1));
    }
    for (; i < count; ++i) out[i] = squared_distance(rows + 2 * i, x, 2);
    return;
  }
  for (std::size_t i = 0; i < count; ++i) out[i] = squared_distance(rows + i * n, x, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j + 4), _mm256_loadu_pd(b + j + 4), acc1);
  }
  for (; j + 4 <= n; j += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) s += a[j] * b[j];
  return s;
}

void axpy2(double a1, const double* x1, double a2, const double* x2, double* y, std::size_t n) {
  const __m256d c1 = _mm256_set1_pd(a1);
  const __m256d c2 = _mm256_set1_pd(a2);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d v = _mm256_loadu_pd(y + j);
    v = _mm256_fmadd_pd(c1, _mm256_loadu_pd(x1 + j), v);
    v = _mm256_fmadd_pd(c2, _mm256_loadu_pd(x2 + j), v);
    _mm256_storeu_pd(y + j, v);
  }
  for (; j < n; ++j) y[j] += a1 * x1[j] + a2 * x2[j];
}

constexpr KernelTable kAvx2{"avx2", squared_distance, squared_distance_rows, dot, axpy2};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2; }

}  // namespace orthomads::simd
