#pragma once

#include "dbcc/codec/config.hpp"
#include "dbcc/tensor/conv.hpp"
#include "dbcc/tensor/ops.hpp"

namespace dbcc {

namespace detail {

// Depthwise 11x11 Gaussian (sigma 1.5) as a constant conv kernel.
template <typename T>
Tensor<T> msssim_blur_kernel(int channels) {
  constexpr int kWin = 11;
  double taps[kWin];
  double sum = 0;
  for (int i = 0; i < kWin; ++i) {
    const double x = i - kWin / 2;
    taps[i] = std::exp(-x * x / (2 * 1.5 * 1.5));
    sum += taps[i];
  }
  for (auto& t : taps) t /= sum;
  Tensor<T> w(Shape{channels, channels, kWin, kWin});
  for (int c = 0; c < channels; ++c)
    for (int i = 0; i < kWin; ++i)
      for (int j = 0; j < kWin; ++j)
        w.data()[((std::size_t(c) * channels + c) * kWin + i) * kWin + j] =
            T(taps[i] * taps[j]);
  return w;
}

}  // namespace detail

// Differentiable 5-scale MS-SSIM used as a training distortion. Uses
// zero-padded same-size Gaussian filtering; identical inputs evaluate to
// exactly 1 under any padding, which is the property the loss needs.
template <typename T>
Tensor<T> ms_ssim_loss_value(const Tensor<T>& x, const Tensor<T>& y) {
  if (x.shape() != y.shape()) throw shape_error("ms_ssim: shape mismatch");
  if (std::min(x.dim(1), x.dim(2)) < 160)
    throw config_error("ms_ssim loss: needs min(H, W) >= 160");
  constexpr double weights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  const T c1 = T(0.01 * 0.01), c2 = T(0.03 * 0.03);
  const auto kernel = detail::msssim_blur_kernel<T>(x.dim(0));
  auto blur = [&kernel](const Tensor<T>& t) {
    return conv2d(t, kernel, 1, 5);
  };

  Tensor<T> a = x, b = y;
  Tensor<T> value = Tensor<T>::scalar(T(0));  // log-domain accumulator
  for (int s = 0; s < 5; ++s) {
    auto ma = blur(a), mb = blur(b);
    auto va = sub(blur(mul(a, a)), mul(ma, ma));
    auto vb = sub(blur(mul(b, b)), mul(mb, mb));
    auto vab = sub(blur(mul(a, b)), mul(ma, mb));
    auto cs = div(add_scalar(mul_scalar(vab, T(2)), c2),
                  add_scalar(add(va, vb), c2));
    Tensor<T> term;
    if (s == 4) {
      auto l = div(add_scalar(mul_scalar(mul(ma, mb), T(2)), c1),
                   add_scalar(add(mul(ma, ma), mul(mb, mb)), c1));
      term = mean(mul(l, cs));
    } else {
      term = mean(cs);
      a = avg_pool2(a);
      b = avg_pool2(b);
    }
    value = add(value,
                mul_scalar(log_op(clamp_min(term, T(1e-6))),
                           T(weights[s])));
  }
  return exp_op(value);
}

// R-D objective for one image (or a batch mean of these):
//   mse:     lambda * 255^2 * mean((x - xhat)^2) + bits / num_pixels
//   ms_ssim: lambda * (1 - MS-SSIM(x, xhat))     + bits / num_pixels
template <typename T>
Tensor<T> rd_loss(const Tensor<T>& x, const Tensor<T>& xhat,
                  const Tensor<T>& bits, double lambda,
                  DistortionMetric metric, std::size_t num_pixels) {
  if (x.shape() != xhat.shape()) throw shape_error("rd_loss: shape mismatch");
  const auto rate = mul_scalar(bits, T(1.0 / double(num_pixels)));
  if (metric == DistortionMetric::mse) {
    auto d = sub(x, xhat);
    auto distortion = mul_scalar(mean(mul(d, d)), T(lambda * 255.0 * 255.0));
    return add(distortion, rate);
  }
  auto distortion = mul_scalar(
      add_scalar(mul_scalar(ms_ssim_loss_value(x, xhat), T(-1)), T(1)),
      T(lambda));
  return add(distortion, rate);
}

}  // namespace dbcc
