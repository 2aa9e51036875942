#pragma once

#include <cmath>
#include <cstring>
#include <type_traits>

#include "dbcc/simd/kernels.hpp"
#include "dbcc/tensor/tensor.hpp"

namespace dbcc {

namespace detail {

template <typename T>
inline void axpy(std::size_t n, T alpha, const T* x, T* y) {
  if constexpr (std::is_same_v<T, float>) {
    simd::saxpy(n, alpha, x, y);
  } else {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
  }
}

template <typename T>
inline void gemm(int m, int n, int k, const T* a, int lda, const T* b, int ldb,
                 T* c, int ldc, bool accumulate) {
  if constexpr (std::is_same_v<T, float>)
    simd::sgemm(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
  else
    simd::dgemm(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

template <typename T>
inline bool wants_grad(const TensorNode<T>& n, std::size_t i) {
  return n.parents[i]->requires_grad;
}

}  // namespace detail

// ---- elementwise ----------------------------------------------------------

template <typename T, typename F, typename DF>
Tensor<T> unary_op(const Tensor<T>& x, F f, DF dfdx) {
  std::vector<T> out(x.size());
  const T* xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(xv[i]);
  return make_result<T>(
      x.shape(), std::move(out), {x}, [dfdx](TensorNode<T>& n) {
        if (!detail::wants_grad(n, 0)) return;
        auto& p = *n.parents[0];
        auto& gx = p.ensure_grad();
        for (std::size_t i = 0; i < gx.size(); ++i)
          gx[i] += n.grad[i] * dfdx(p.value[i], n.value[i]);
      });
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope = T(0.01)) {
  if (!(slope > T(0) && slope < T(1)))
    throw config_error("leaky_relu slope must be in (0,1)");
  if constexpr (std::is_same_v<T, float>) {
    std::vector<T> out(x.size());
    simd::leaky_relu_forward(x.size(), slope, x.data(), out.data());
    return make_result<T>(x.shape(), std::move(out), {x},
                          [slope](TensorNode<T>& n) {
                            if (!detail::wants_grad(n, 0)) return;
                            auto& p = *n.parents[0];
                            simd::leaky_relu_backward(
                                p.value.size(), slope, p.value.data(),
                                n.grad.data(), p.ensure_grad().data());
                          });
  } else {
    return unary_op(
        x, [slope](T v) { return v > T(0) ? v : slope * v; },
        [slope](T v, T) { return v > T(0) ? T(1) : slope; });
  }
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  return unary_op(
      x, [](T v) { return T(1) / (T(1) + std::exp(-v)); },
      [](T, T y) { return y * (T(1) - y); });
}

template <typename T>
Tensor<T> softplus(const Tensor<T>& x) {
  return unary_op(
      x,
      [](T v) {
        // log1p(exp(v)) without overflow for large v.
        return v > T(20) ? v : T(std::log1p(std::exp(double(v))));
      },
      [](T v, T) { return T(1) / (T(1) + std::exp(-v)); });
}

template <typename T>
Tensor<T> tanh_op(const Tensor<T>& x) {
  return unary_op(
      x, [](T v) { return std::tanh(v); },
      [](T, T y) { return T(1) - y * y; });
}

template <typename T>
Tensor<T> exp_op(const Tensor<T>& x) {
  return unary_op(
      x, [](T v) { return std::exp(v); }, [](T, T y) { return y; });
}

template <typename T>
Tensor<T> log_op(const Tensor<T>& x) {
  return unary_op(
      x, [](T v) { return std::log(v); }, [](T v, T) { return T(1) / v; });
}

// Standard normal CDF via erfc; gradient is the normal pdf.
template <typename T>
Tensor<T> normal_cdf(const Tensor<T>& x) {
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  constexpr double inv_sqrt2pi = 0.3989422804014326779;
  return unary_op(
      x, [](T v) { return T(0.5 * std::erfc(-double(v) * inv_sqrt2)); },
      [](T v, T) {
        return T(inv_sqrt2pi * std::exp(-0.5 * double(v) * double(v)));
      });
}

template <typename T>
Tensor<T> clamp(const Tensor<T>& x, T lo, T hi) {
  return unary_op(
      x, [lo, hi](T v) { return v < lo ? lo : (v > hi ? hi : v); },
      [lo, hi](T v, T) { return (v > lo && v < hi) ? T(1) : T(0); });
}

template <typename T>
Tensor<T> clamp_min(const Tensor<T>& x, T lo) {
  return unary_op(
      x, [lo](T v) { return v < lo ? lo : v; },
      [lo](T v, T) { return v > lo ? T(1) : T(0); });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& x, T c) {
  return unary_op(
      x, [c](T v) { return v + c; }, [](T, T) { return T(1); });
}

template <typename T>
Tensor<T> mul_scalar(const Tensor<T>& x, T c) {
  return unary_op(
      x, [c](T v) { return v * c; }, [c](T, T) { return c; });
}

namespace detail {
template <typename T>
inline void check_same_shape(const Tensor<T>& a, const Tensor<T>& b,
                             const char* op) {
  if (a.shape() != b.shape())
    throw shape_error(std::string(op) + ": shape mismatch");
}
}  // namespace detail

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  detail::check_same_shape(a, b, "add");
  std::vector<T> out(a.size());
  if constexpr (std::is_same_v<T, float>)
    simd::add(a.size(), a.data(), b.data(), out.data());
  else
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = a.data()[i] + b.data()[i];
  return make_result<T>(a.shape(), std::move(out), {a, b},
                        [](TensorNode<T>& n) {
                          for (std::size_t s = 0; s < 2; ++s) {
                            if (!detail::wants_grad(n, s)) continue;
                            detail::axpy(n.grad.size(), T(1), n.grad.data(),
                                         n.parents[s]->ensure_grad().data());
                          }
                        });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  detail::check_same_shape(a, b, "sub");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = a.data()[i] - b.data()[i];
  return make_result<T>(a.shape(), std::move(out), {a, b},
                        [](TensorNode<T>& n) {
                          if (detail::wants_grad(n, 0))
                            detail::axpy(n.grad.size(), T(1), n.grad.data(),
                                         n.parents[0]->ensure_grad().data());
                          if (detail::wants_grad(n, 1))
                            detail::axpy(n.grad.size(), T(-1), n.grad.data(),
                                         n.parents[1]->ensure_grad().data());
                        });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  detail::check_same_shape(a, b, "mul");
  std::vector<T> out(a.size());
  if constexpr (std::is_same_v<T, float>)
    simd::mul(a.size(), a.data(), b.data(), out.data());
  else
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = a.data()[i] * b.data()[i];
  return make_result<T>(
      a.shape(), std::move(out), {a, b}, [](TensorNode<T>& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        if (pa.requires_grad) {
          auto& ga = pa.ensure_grad();
          for (std::size_t i = 0; i < ga.size(); ++i)
            ga[i] += n.grad[i] * pb.value[i];
        }
        if (pb.requires_grad) {
          auto& gb = pb.ensure_grad();
          for (std::size_t i = 0; i < gb.size(); ++i)
            gb[i] += n.grad[i] * pa.value[i];
        }
      });
}

template <typename T>
Tensor<T> div(const Tensor<T>& a, const Tensor<T>& b) {
  detail::check_same_shape(a, b, "div");
  std::vector<T> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = a.data()[i] / b.data()[i];
  return make_result<T>(
      a.shape(), std::move(out), {a, b}, [](TensorNode<T>& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        if (pa.requires_grad) {
          auto& ga = pa.ensure_grad();
          for (std::size_t i = 0; i < ga.size(); ++i)
            ga[i] += n.grad[i] / pb.value[i];
        }
        if (pb.requires_grad) {
          auto& gb = pb.ensure_grad();
          for (std::size_t i = 0; i < gb.size(); ++i)
            gb[i] -= n.grad[i] * n.value[i] / pb.value[i];
        }
      });
}

// ---- reductions -----------------------------------------------------------

template <typename T>
Tensor<T> sum(const Tensor<T>& x) {
  T total;
  if constexpr (std::is_same_v<T, float>)
    total = simd::reduce_sum(x.size(), x.data());
  else {
    total = T(0);
    for (std::size_t i = 0; i < x.size(); ++i) total += x.data()[i];
  }
  return make_result<T>(Shape{1}, std::vector<T>{total}, {x},
                        [](TensorNode<T>& n) {
                          if (!detail::wants_grad(n, 0)) return;
                          auto& gx = n.parents[0]->ensure_grad();
                          const T g = n.grad[0];
                          for (auto& v : gx) v += g;
                        });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& x) {
  return mul_scalar(sum(x), T(1) / T(x.size()));
}

// ---- shape ops ------------------------------------------------------------

// Channel-order preserving concatenation along dim 0 of CHW tensors.
template <typename T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& xs) {
  if (xs.empty()) throw shape_error("concat_channels: empty input list");
  const int h = xs[0].dim(1), w = xs[0].dim(2);
  int ctotal = 0;
  for (const auto& x : xs) {
    if (x.ndim() != 3) throw shape_error("concat_channels: expects CHW");
    if (x.dim(1) != h || x.dim(2) != w)
      throw shape_error("concat_channels: spatial dims mismatch");
    ctotal += x.dim(0);
  }
  std::vector<T> out;
  out.reserve(std::size_t(ctotal) * h * w);
  for (const auto& x : xs)
    out.insert(out.end(), x.values().begin(), x.values().end());
  return make_result<T>(Shape{ctotal, h, w}, std::move(out), xs,
                        [](TensorNode<T>& n) {
                          std::size_t off = 0;
                          for (std::size_t s = 0; s < n.parents.size(); ++s) {
                            auto& p = *n.parents[s];
                            const std::size_t len = p.value.size();
                            if (p.requires_grad)
                              detail::axpy(len, T(1), n.grad.data() + off,
                                           p.ensure_grad().data());
                            off += len;
                          }
                        });
}

template <typename T>
Tensor<T> slice_channels(const Tensor<T>& x, int c0, int c1) {
  if (x.ndim() != 3) throw shape_error("slice_channels: expects CHW");
  if (c0 < 0 || c1 > x.dim(0) || c0 >= c1)
    throw shape_error("slice_channels: bad range");
  const std::size_t plane = std::size_t(x.dim(1)) * x.dim(2);
  const std::size_t off = std::size_t(c0) * plane;
  const std::size_t len = std::size_t(c1 - c0) * plane;
  std::vector<T> out(x.data() + off, x.data() + off + len);
  return make_result<T>(Shape{c1 - c0, x.dim(1), x.dim(2)}, std::move(out),
                        {x}, [off, len](TensorNode<T>& n) {
                          if (!detail::wants_grad(n, 0)) return;
                          detail::axpy(len, T(1), n.grad.data(),
                                       n.parents[0]->ensure_grad().data() +
                                           off);
                        });
}

// out[c,:,:] = x[c,:,:] + b[c]
template <typename T>
Tensor<T> add_channel_bias(const Tensor<T>& x, const Tensor<T>& b) {
  if (x.ndim() != 3 || b.ndim() != 1 || b.dim(0) != x.dim(0))
    throw shape_error("add_channel_bias: shape mismatch");
  const std::size_t plane = std::size_t(x.dim(1)) * x.dim(2);
  std::vector<T> out(x.size());
  for (int c = 0; c < x.dim(0); ++c) {
    const T bv = b.data()[c];
    const T* src = x.data() + std::size_t(c) * plane;
    T* dst = out.data() + std::size_t(c) * plane;
    for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] + bv;
  }
  return make_result<T>(
      x.shape(), std::move(out), {x, b}, [plane](TensorNode<T>& n) {
        if (detail::wants_grad(n, 0))
          detail::axpy(n.grad.size(), T(1), n.grad.data(),
                       n.parents[0]->ensure_grad().data());
        if (detail::wants_grad(n, 1)) {
          auto& gb = n.parents[1]->ensure_grad();
          for (std::size_t c = 0; c < gb.size(); ++c) {
            T s = T(0);
            const T* g = n.grad.data() + c * plane;
            for (std::size_t i = 0; i < plane; ++i) s += g[i];
            gb[c] += s;
          }
        }
      });
}

// out[c,:,:] = x[c,:,:] * s[c]
template <typename T>
Tensor<T> channel_scale(const Tensor<T>& x, const Tensor<T>& s) {
  if (x.ndim() != 3 || s.ndim() != 1 || s.dim(0) != x.dim(0))
    throw shape_error("channel_scale: shape mismatch");
  const std::size_t plane = std::size_t(x.dim(1)) * x.dim(2);
  std::vector<T> out(x.size());
  for (int c = 0; c < x.dim(0); ++c) {
    const T sv = s.data()[c];
    const T* src = x.data() + std::size_t(c) * plane;
    T* dst = out.data() + std::size_t(c) * plane;
    for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] * sv;
  }
  return make_result<T>(
      x.shape(), std::move(out), {x, s}, [plane](TensorNode<T>& n) {
        auto& px = *n.parents[0];
        auto& ps = *n.parents[1];
        if (px.requires_grad) {
          auto& gx = px.ensure_grad();
          for (std::size_t c = 0; c < ps.value.size(); ++c)
            detail::axpy(plane, ps.value[c], n.grad.data() + c * plane,
                         gx.data() + c * plane);
        }
        if (ps.requires_grad) {
          auto& gs = ps.ensure_grad();
          for (std::size_t c = 0; c < gs.size(); ++c) {
            T acc = T(0);
            const T* g = n.grad.data() + c * plane;
            const T* xv = px.value.data() + c * plane;
            for (std::size_t i = 0; i < plane; ++i) acc += g[i] * xv[i];
            gs[c] += acc;
          }
        }
      });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (numel(shape) != x.size()) throw shape_error("reshape: size mismatch");
  std::vector<T> out(x.values());
  return make_result<T>(std::move(shape), std::move(out), {x},
                        [](TensorNode<T>& n) {
                          if (!detail::wants_grad(n, 0)) return;
                          detail::axpy(n.grad.size(), T(1), n.grad.data(),
                                       n.parents[0]->ensure_grad().data());
                        });
}

}  // namespace dbcc
