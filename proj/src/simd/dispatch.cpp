#include <cstdlib>
#include <cstring>
#include <optional>

#include "dbcc/simd/kernels.hpp"

namespace dbcc::simd {

namespace {

std::optional<Isa> g_forced;

Isa detect() {
  if (const char* env = std::getenv("DBCC_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0) return Isa::avx2;
  }
  return cpu_supports_avx2() ? Isa::avx2 : Isa::scalar;
}

Isa current() { return g_forced ? *g_forced : detect(); }

}  // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current(); }
void force_isa(Isa isa) { g_forced = isa; }
void reset_isa() { g_forced.reset(); }

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

void sgemm(int m, int n, int k, const float* a, int lda, const float* b,
           int ldb, float* c, int ldc, bool accumulate) {
  if (current() == Isa::avx2)
    detail::sgemm_avx2(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
  else
    detail::sgemm_scalar(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

void saxpy(std::size_t n, float alpha, const float* x, float* y) {
  if (current() == Isa::avx2)
    detail::saxpy_avx2(n, alpha, x, y);
  else
    detail::saxpy_scalar(n, alpha, x, y);
}

void add(std::size_t n, const float* a, const float* b, float* out) {
  if (current() == Isa::avx2)
    detail::add_avx2(n, a, b, out);
  else
    detail::add_scalar_impl(n, a, b, out);
}

void mul(std::size_t n, const float* a, const float* b, float* out) {
  if (current() == Isa::avx2)
    detail::mul_avx2(n, a, b, out);
  else
    detail::mul_scalar_impl(n, a, b, out);
}

void leaky_relu_forward(std::size_t n, float slope, const float* x, float* y) {
  if (current() == Isa::avx2)
    detail::lrelu_fwd_avx2(n, slope, x, y);
  else
    detail::lrelu_fwd_scalar(n, slope, x, y);
}

void leaky_relu_backward(std::size_t n, float slope, const float* x,
                         const float* dy, float* dx) {
  if (current() == Isa::avx2)
    detail::lrelu_bwd_avx2(n, slope, x, dy, dx);
  else
    detail::lrelu_bwd_scalar(n, slope, x, dy, dx);
}

float reduce_sum(std::size_t n, const float* x) {
  if (current() == Isa::avx2) return detail::reduce_sum_avx2(n, x);
  return detail::reduce_sum_scalar(n, x);
}

}  // namespace dbcc::simd
