// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; it must only be reached through the runtime dispatcher.

#include <immintrin.h>

#include "dbcc/simd/kernels.hpp"

namespace dbcc::simd::detail {

namespace {

// MR x 16 register-blocked microkernel. Accumulators stay in ymm registers
// across the full K loop; B rows are streamed.
template <int MR>
inline void kernel_mx16(int k, const float* a, int lda, const float* b,
                        int ldb, float* c, int ldc, bool accumulate) {
  __m256 acc0[MR], acc1[MR];
  for (int i = 0; i < MR; ++i) {
    acc0[i] = _mm256_setzero_ps();
    acc1[i] = _mm256_setzero_ps();
  }
  for (int p = 0; p < k; ++p) {
    const float* brow = b + std::size_t(p) * ldb;
    const __m256 b0 = _mm256_loadu_ps(brow);
    const __m256 b1 = _mm256_loadu_ps(brow + 8);
    for (int i = 0; i < MR; ++i) {
      const __m256 av = _mm256_broadcast_ss(a + std::size_t(i) * lda + p);
      acc0[i] = _mm256_fmadd_ps(av, b0, acc0[i]);
      acc1[i] = _mm256_fmadd_ps(av, b1, acc1[i]);
    }
  }
  for (int i = 0; i < MR; ++i) {
    float* crow = c + std::size_t(i) * ldc;
    if (accumulate) {
      acc0[i] = _mm256_add_ps(acc0[i], _mm256_loadu_ps(crow));
      acc1[i] = _mm256_add_ps(acc1[i], _mm256_loadu_ps(crow + 8));
    }
    _mm256_storeu_ps(crow, acc0[i]);
    _mm256_storeu_ps(crow + 8, acc1[i]);
  }
}

template <int MR>
inline void kernel_mx8(int k, const float* a, int lda, const float* b, int ldb,
                       float* c, int ldc, bool accumulate) {
  __m256 acc[MR];
  for (int i = 0; i < MR; ++i) acc[i] = _mm256_setzero_ps();
  for (int p = 0; p < k; ++p) {
    const __m256 b0 = _mm256_loadu_ps(b + std::size_t(p) * ldb);
    for (int i = 0; i < MR; ++i) {
      const __m256 av = _mm256_broadcast_ss(a + std::size_t(i) * lda + p);
      acc[i] = _mm256_fmadd_ps(av, b0, acc[i]);
    }
  }
  for (int i = 0; i < MR; ++i) {
    float* crow = c + std::size_t(i) * ldc;
    if (accumulate) acc[i] = _mm256_add_ps(acc[i], _mm256_loadu_ps(crow));
    _mm256_storeu_ps(crow, acc[i]);
  }
}

inline void tail_scalar(int m, int n, int k, const float* a, int lda,
                        const float* b, int ldb, float* c, int ldc,
                        bool accumulate) {
  for (int i = 0; i < m; ++i) {
    float* crow = c + std::size_t(i) * ldc;
    if (!accumulate)
      for (int j = 0; j < n; ++j) crow[j] = 0.0f;
    for (int p = 0; p < k; ++p) {
      const float av = a[std::size_t(i) * lda + p];
      const float* brow = b + std::size_t(p) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <int MR>
inline void row_block(int n, int k, const float* a, int lda, const float* b,
                      int ldb, float* c, int ldc, bool accumulate) {
  int j = 0;
  for (; j + 16 <= n; j += 16)
    kernel_mx16<MR>(k, a, lda, b + j, ldb, c + j, ldc, accumulate);
  for (; j + 8 <= n; j += 8)
    kernel_mx8<MR>(k, a, lda, b + j, ldb, c + j, ldc, accumulate);
  if (j < n) tail_scalar(MR, n - j, k, a, lda, b + j, ldb, c + j, ldc,
                         accumulate);
}

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_hadd_ps(lo, lo);
  lo = _mm_hadd_ps(lo, lo);
  return _mm_cvtss_f32(lo);
}

}  // namespace

void sgemm_avx2(int m, int n, int k, const float* a, int lda, const float* b,
                int ldb, float* c, int ldc, bool accumulate) {
  int i = 0;
  for (; i + 6 <= m; i += 6)
    row_block<6>(n, k, a + std::size_t(i) * lda, lda, b, ldb,
                 c + std::size_t(i) * ldc, ldc, accumulate);
  switch (m - i) {
    case 5:
      row_block<5>(n, k, a + std::size_t(i) * lda, lda, b, ldb,
                   c + std::size_t(i) * ldc, ldc, accumulate);
      break;
    case 4:
      row_block<4>(n, k, a + std::size_t(i) * lda, lda, b, ldb,
                   c + std::size_t(i) * ldc, ldc, accumulate);
      break;
    case 3:
      row_block<3>(n, k, a + std::size_t(i) * lda, lda, b, ldb,
                   c + std::size_t(i) * ldc, ldc, accumulate);
      break;
    case 2:
      row_block<2>(n, k, a + std::size_t(i) * lda, lda, b, ldb,
                   c + std::size_t(i) * ldc, ldc, accumulate);
      break;
    case 1:
      row_block<1>(n, k, a + std::size_t(i) * lda, lda, b, ldb,
                   c + std::size_t(i) * ldc, ldc, accumulate);
      break;
    default:
      break;
  }
}

void saxpy_avx2(std::size_t n, float alpha, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_avx2(std::size_t n, const float* a, const float* b, float* out) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i, _mm256_add_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void mul_avx2(std::size_t n, const float* a, const float* b, float* out) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void lrelu_fwd_avx2(std::size_t n, float slope, const float* x, float* y) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vx = _mm256_loadu_ps(x + i);
    const __m256 neg = _mm256_mul_ps(vx, vs);
    const __m256 mask = _mm256_cmp_ps(vx, zero, _CMP_GT_OQ);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(neg, vx, mask));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void lrelu_bwd_avx2(std::size_t n, float slope, const float* x,
                    const float* dy, float* dx) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 vx = _mm256_loadu_ps(x + i);
    const __m256 mask = _mm256_cmp_ps(vx, zero, _CMP_GT_OQ);
    const __m256 d = _mm256_blendv_ps(vs, one, mask);
    __m256 vdx = _mm256_loadu_ps(dx + i);
    vdx = _mm256_fmadd_ps(d, _mm256_loadu_ps(dy + i), vdx);
    _mm256_storeu_ps(dx + i, vdx);
  }
  for (; i < n; ++i) dx[i] += dy[i] * (x[i] > 0.0f ? 1.0f : slope);
}

float reduce_sum_avx2(std::size_t n, const float* x) {
  __m256 s0 = _mm256_setzero_ps();
  __m256 s1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_add_ps(s0, _mm256_loadu_ps(x + i));
    s1 = _mm256_add_ps(s1, _mm256_loadu_ps(x + i + 8));
  }
  float total = hsum(_mm256_add_ps(s0, s1));
  for (; i < n; ++i) total += x[i];
  return total;
}

}  // namespace dbcc::simd::detail
