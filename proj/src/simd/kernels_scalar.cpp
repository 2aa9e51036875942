#include "dbcc/simd/kernels.hpp"

namespace dbcc::simd::detail {

void sgemm_scalar(int m, int n, int k, const float* a, int lda, const float* b,
                  int ldb, float* c, int ldc, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    float* crow = c + std::size_t(i) * ldc;
    if (!accumulate) {
      for (int j = 0; j < n; ++j) crow[j] = 0.0f;
    }
    for (int p = 0; p < k; ++p) {
      const float av = a[std::size_t(i) * lda + p];
      if (av == 0.0f) continue;
      const float* brow = b + std::size_t(p) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void saxpy_scalar(std::size_t n, float alpha, const float* x, float* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_scalar_impl(std::size_t n, const float* a, const float* b,
                     float* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void mul_scalar_impl(std::size_t n, const float* a, const float* b,
                     float* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void lrelu_fwd_scalar(std::size_t n, float slope, const float* x, float* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void lrelu_bwd_scalar(std::size_t n, float slope, const float* x,
                      const float* dy, float* dx) {
  for (std::size_t i = 0; i < n; ++i)
    dx[i] += dy[i] * (x[i] > 0.0f ? 1.0f : slope);
}

float reduce_sum_scalar(std::size_t n, const float* x) {
  // Pairwise-ish accumulation in four lanes keeps error growth modest.
  float s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i];
    s1 += x[i + 1];
    s2 += x[i + 2];
    s3 += x[i + 3];
  }
  for (; i < n; ++i) s0 += x[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace dbcc::simd::detail

namespace dbcc::simd {

void dgemm(int m, int n, int k, const double* a, int lda, const double* b,
           int ldb, double* c, int ldc, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    double* crow = c + std::size_t(i) * ldc;
    if (!accumulate) {
      for (int j = 0; j < n; ++j) crow[j] = 0.0;
    }
    for (int p = 0; p < k; ++p) {
      const double av = a[std::size_t(i) * lda + p];
      if (av == 0.0) continue;
      const double* brow = b + std::size_t(p) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace dbcc::simd
