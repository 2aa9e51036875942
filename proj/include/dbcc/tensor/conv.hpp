#pragma once

#include "dbcc/tensor/ops.hpp"

namespace dbcc {

namespace detail {

// col[(c,ki,kj)][(ho,wo)] = x[c, ho*s-p+ki, wo*s-p+kj], zero outside.
template <typename T>
void im2col(const T* x, int c, int h, int w, int k, int stride, int pad,
            int ho, int wo, T* col) {
  const std::size_t plane = std::size_t(h) * w;
  const std::size_t oplane = std::size_t(ho) * wo;
  for (int ch = 0; ch < c; ++ch) {
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        T* dst = col + ((std::size_t(ch) * k + ki) * k + kj) * oplane;
        const T* src = x + std::size_t(ch) * plane;
        for (int oh = 0; oh < ho; ++oh) {
          const int ih = oh * stride - pad + ki;
          T* drow = dst + std::size_t(oh) * wo;
          if (ih < 0 || ih >= h) {
            for (int ow = 0; ow < wo; ++ow) drow[ow] = T(0);
            continue;
          }
          const T* srow = src + std::size_t(ih) * w;
          int ow = 0;
          int iw = -pad + kj;
          if (stride == 1) {
            for (; ow < wo && iw < 0; ++ow, ++iw) drow[ow] = T(0);
            const int run = std::min(wo, w - iw) - ow;
            if (run > 0) {
              std::memcpy(drow + ow, srow + iw, std::size_t(run) * sizeof(T));
              ow += run;
              iw += run;
            }
            for (; ow < wo; ++ow) drow[ow] = T(0);
          } else {
            for (; ow < wo; ++ow, iw += stride)
              drow[ow] = (iw >= 0 && iw < w) ? srow[iw] : T(0);
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters column entries back into the image.
template <typename T>
void col2im(const T* col, int c, int h, int w, int k, int stride, int pad,
            int ho, int wo, T* x, bool accumulate) {
  const std::size_t plane = std::size_t(h) * w;
  const std::size_t oplane = std::size_t(ho) * wo;
  if (!accumulate) std::fill(x, x + std::size_t(c) * plane, T(0));
  for (int ch = 0; ch < c; ++ch) {
    T* dst = x + std::size_t(ch) * plane;
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        const T* src = col + ((std::size_t(ch) * k + ki) * k + kj) * oplane;
        for (int oh = 0; oh < ho; ++oh) {
          const int ih = oh * stride - pad + ki;
          if (ih < 0 || ih >= h) continue;
          const T* srow = src + std::size_t(oh) * wo;
          T* drow = dst + std::size_t(ih) * w;
          int iw = -pad + kj;
          for (int ow = 0; ow < wo; ++ow, iw += stride)
            if (iw >= 0 && iw < w) drow[iw] += srow[ow];
        }
      }
    }
  }
}

template <typename T>
void transpose(const T* src, int rows, int cols, T* dst) {
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      dst[std::size_t(j) * rows + i] = src[std::size_t(i) * cols + j];
}

inline void check_conv_args(int k, int stride, int h, int pad) {
  if (k < 1 || k % 2 == 0)
    throw shape_error("conv: kernel size must be odd and positive");
  if (stride != 1 && stride != 2) throw shape_error("conv: stride must be 1 or 2");
  if (h + 2 * pad < k) throw shape_error("conv: input smaller than kernel");
}

}  // namespace detail

// Cross-correlation of x[Ci,H,W] with w[Co,Ci,k,k].
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, int stride, int pad) {
  if (x.ndim() != 3 || w.ndim() != 4) throw shape_error("conv2d: expects CHW input and OIKK kernel");
  const int ci = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const int co = w.dim(0), k = w.dim(2);
  if (w.dim(1) != ci) throw shape_error("conv2d: channel mismatch");
  if (w.dim(3) != k) throw shape_error("conv2d: kernel must be square");
  detail::check_conv_args(k, stride, std::min(h, wd), pad);
  const int ho = (h + 2 * pad - k) / stride + 1;
  const int wo = (wd + 2 * pad - k) / stride + 1;
  const int kk = ci * k * k;
  const std::size_t oplane = std::size_t(ho) * wo;

  std::vector<T> out(std::size_t(co) * oplane);
  if (k == 1 && stride == 1 && pad == 0) {
    detail::gemm<T>(co, int(oplane), ci, w.data(), ci, x.data(), int(oplane),
                    out.data(), int(oplane), false);
  } else {
    std::vector<T> col(std::size_t(kk) * oplane);
    detail::im2col(x.data(), ci, h, wd, k, stride, pad, ho, wo, col.data());
    detail::gemm<T>(co, int(oplane), kk, w.data(), kk, col.data(),
                    int(oplane), out.data(), int(oplane), false);
  }

  auto bp = [ci, h, wd, k, stride, pad, ho, wo, kk, co,
             oplane](TensorNode<T>& n) {
    auto& px = *n.parents[0];
    auto& pw = *n.parents[1];
    // Column matrix is rebuilt here instead of cached from the forward
    // pass; it is the largest buffer in the graph.
    std::vector<T> col;
    const T* colp = px.value.data();
    if (!(k == 1 && stride == 1 && pad == 0)) {
      col.resize(std::size_t(kk) * oplane);
      detail::im2col(px.value.data(), ci, h, wd, k, stride, pad, ho, wo,
                     col.data());
      colp = col.data();
    }
    if (pw.requires_grad) {
      // dW^T = col * dY^T, so transpose dY then the small result.
      std::vector<T> dyt(n.grad.size());
      detail::transpose(n.grad.data(), co, int(oplane), dyt.data());
      std::vector<T> dwt(std::size_t(kk) * co);
      detail::gemm<T>(kk, co, int(oplane), colp, int(oplane), dyt.data(), co,
                      dwt.data(), co, false);
      auto& gw = pw.ensure_grad();
      for (int i = 0; i < co; ++i)
        for (int j = 0; j < kk; ++j)
          gw[std::size_t(i) * kk + j] += dwt[std::size_t(j) * co + i];
    }
    if (px.requires_grad) {
      std::vector<T> wt(std::size_t(kk) * co);
      detail::transpose(pw.value.data(), co, kk, wt.data());
      std::vector<T> dcol(std::size_t(kk) * oplane);
      detail::gemm<T>(kk, int(oplane), co, wt.data(), co, n.grad.data(),
                      int(oplane), dcol.data(), int(oplane), false);
      auto& gx = px.ensure_grad();
      if (k == 1 && stride == 1 && pad == 0) {
        detail::axpy(gx.size(), T(1), dcol.data(), gx.data());
      } else {
        detail::col2im(dcol.data(), ci, h, wd, k, stride, pad, ho, wo,
                       gx.data(), true);
      }
    }
  };
  return make_result<T>(Shape{co, ho, wo}, std::move(out), {x, w},
                        std::move(bp));
}

// Adjoint of conv2d with shared kernel: x[Ci,H,W], w[Ci,Co,k,k].
template <typename T>
Tensor<T> transposed_conv2d(const Tensor<T>& x, const Tensor<T>& w, int stride,
                            int pad, int output_pad) {
  if (x.ndim() != 3 || w.ndim() != 4)
    throw shape_error("transposed_conv2d: expects CHW input and IOKK kernel");
  const int ci = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const int co = w.dim(1), k = w.dim(2);
  if (w.dim(0) != ci) throw shape_error("transposed_conv2d: channel mismatch");
  detail::check_conv_args(k, stride, h, pad);
  if (output_pad < 0 || output_pad >= stride)
    throw shape_error("transposed_conv2d: bad output padding");
  const int ho = (h - 1) * stride - 2 * pad + k + output_pad;
  const int wo = (wd - 1) * stride - 2 * pad + k + output_pad;
  const int kk = co * k * k;
  const std::size_t iplane = std::size_t(h) * wd;

  // wt[(co,ki,kj)][ci]; the native layout w[ci][(co,ki,kj)] is its transpose.
  std::vector<T> wt(std::size_t(kk) * ci);
  detail::transpose(w.data(), ci, kk, wt.data());
  std::vector<T> col(std::size_t(kk) * iplane);
  detail::gemm<T>(kk, int(iplane), ci, wt.data(), ci, x.data(), int(iplane),
                  col.data(), int(iplane), false);
  std::vector<T> out(std::size_t(co) * ho * wo);
  detail::col2im(col.data(), co, ho, wo, k, stride, pad, h, wd, out.data(),
                 false);

  auto bp = [ci, h, wd, k, stride, pad, ho, wo, kk, co,
             iplane](TensorNode<T>& n) {
    auto& px = *n.parents[0];
    auto& pw = *n.parents[1];
    std::vector<T> dcol(std::size_t(kk) * iplane);
    detail::im2col(n.grad.data(), co, ho, wo, k, stride, pad, h, wd,
                   dcol.data());
    if (px.requires_grad) {
      // dx = w (as [Ci, Co*k*k]) * dcol
      std::vector<T> dx(px.value.size());
      detail::gemm<T>(ci, int(iplane), kk, pw.value.data(), kk, dcol.data(),
                      int(iplane), dx.data(), int(iplane), false);
      detail::axpy(dx.size(), T(1), dx.data(), px.ensure_grad().data());
    }
    if (pw.requires_grad) {
      // dwt = dcol * x^T -> [kk, ci]; scatter back transposed.
      std::vector<T> xt(px.value.size());
      detail::transpose(px.value.data(), ci, int(iplane), xt.data());
      std::vector<T> dwt(std::size_t(kk) * ci);
      detail::gemm<T>(kk, ci, int(iplane), dcol.data(), int(iplane), xt.data(),
                      ci, dwt.data(), ci, false);
      auto& gw = pw.ensure_grad();
      for (int i = 0; i < kk; ++i)
        for (int j = 0; j < ci; ++j)
          gw[std::size_t(j) * kk + i] += dwt[std::size_t(i) * ci + j];
    }
  };
  return make_result<T>(Shape{co, ho, wo}, std::move(out), {x, w},
                        std::move(bp));
}

// 2x2 average pooling, stride 2; odd trailing row/column is dropped.
template <typename T>
Tensor<T> avg_pool2(const Tensor<T>& x) {
  if (x.ndim() != 3) throw shape_error("avg_pool2: expects CHW");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int ho = h / 2, wo = w / 2;
  if (ho == 0 || wo == 0) throw shape_error("avg_pool2: input too small");
  std::vector<T> out(std::size_t(c) * ho * wo);
  for (int ch = 0; ch < c; ++ch) {
    const T* src = x.data() + std::size_t(ch) * h * w;
    T* dst = out.data() + std::size_t(ch) * ho * wo;
    for (int i = 0; i < ho; ++i)
      for (int j = 0; j < wo; ++j)
        dst[std::size_t(i) * wo + j] =
            T(0.25) * (src[std::size_t(2 * i) * w + 2 * j] +
                       src[std::size_t(2 * i) * w + 2 * j + 1] +
                       src[std::size_t(2 * i + 1) * w + 2 * j] +
                       src[std::size_t(2 * i + 1) * w + 2 * j + 1]);
  }
  return make_result<T>(
      Shape{c, ho, wo}, std::move(out), {x}, [c, h, w, ho, wo](TensorNode<T>& n) {
        if (!detail::wants_grad(n, 0)) return;
        auto& gx = n.parents[0]->ensure_grad();
        for (int ch = 0; ch < c; ++ch) {
          const T* g = n.grad.data() + std::size_t(ch) * ho * wo;
          T* dst = gx.data() + std::size_t(ch) * h * w;
          for (int i = 0; i < ho; ++i)
            for (int j = 0; j < wo; ++j) {
              const T v = T(0.25) * g[std::size_t(i) * wo + j];
              dst[std::size_t(2 * i) * w + 2 * j] += v;
              dst[std::size_t(2 * i) * w + 2 * j + 1] += v;
              dst[std::size_t(2 * i + 1) * w + 2 * j] += v;
              dst[std::size_t(2 * i + 1) * w + 2 * j + 1] += v;
            }
        }
      });
}

}  // namespace dbcc
