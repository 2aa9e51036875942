#pragma once

#include <cstddef>

// Data-parallel inner loops used by the tensor core. Every kernel has a
// scalar reference implementation and an AVX2+FMA variant; the active
// variant is selected once at runtime (cpuid, overridable via the
// DBCC_SIMD environment variable or force_isa for tests).

namespace dbcc::simd {

enum class Isa { scalar, avx2 };

Isa active_isa();
void force_isa(Isa isa);
void reset_isa();
const char* isa_name(Isa isa);
bool cpu_supports_avx2();

// Row-major GEMM: C[m,n] (+)= A[m,k] * B[k,n].
// When accumulate is false, C is overwritten.
void sgemm(int m, int n, int k, const float* a, int lda, const float* b,
           int ldb, float* c, int ldc, bool accumulate);

// Double-precision GEMM used by the gradient-check build; scalar only.
void dgemm(int m, int n, int k, const double* a, int lda, const double* b,
           int ldb, double* c, int ldc, bool accumulate);

void saxpy(std::size_t n, float alpha, const float* x, float* y);
void add(std::size_t n, const float* a, const float* b, float* out);
void mul(std::size_t n, const float* a, const float* b, float* out);
void leaky_relu_forward(std::size_t n, float slope, const float* x, float* y);
// dx += dy * (x > 0 ? 1 : slope)
void leaky_relu_backward(std::size_t n, float slope, const float* x,
                         const float* dy, float* dx);
float reduce_sum(std::size_t n, const float* x);

namespace detail {
void sgemm_scalar(int m, int n, int k, const float* a, int lda, const float* b,
                  int ldb, float* c, int ldc, bool accumulate);
void sgemm_avx2(int m, int n, int k, const float* a, int lda, const float* b,
                int ldb, float* c, int ldc, bool accumulate);
void saxpy_scalar(std::size_t n, float alpha, const float* x, float* y);
void saxpy_avx2(std::size_t n, float alpha, const float* x, float* y);
void add_scalar_impl(std::size_t n, const float* a, const float* b, float* out);
void add_avx2(std::size_t n, const float* a, const float* b, float* out);
void mul_scalar_impl(std::size_t n, const float* a, const float* b, float* out);
void mul_avx2(std::size_t n, const float* a, const float* b, float* out);
void lrelu_fwd_scalar(std::size_t n, float slope, const float* x, float* y);
void lrelu_fwd_avx2(std::size_t n, float slope, const float* x, float* y);
void lrelu_bwd_scalar(std::size_t n, float slope, const float* x,
                      const float* dy, float* dx);
void lrelu_bwd_avx2(std::size_t n, float slope, const float* x,
                    const float* dy, float* dx);
float reduce_sum_scalar(std::size_t n, const float* x);
float reduce_sum_avx2(std::size_t n, const float* x);
}  // namespace detail

}  // namespace dbcc::simd
