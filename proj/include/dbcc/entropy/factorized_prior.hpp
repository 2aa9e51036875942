#pragma once

#include "dbcc/entropy/quantized_cdf.hpp"
#include "dbcc/nn/params.hpp"
#include "dbcc/tensor/conv.hpp"
#include "dbcc/tensor/ops.hpp"

namespace dbcc {

// Learned per-channel static distribution for the hyper-latent: a
// three-stage monotone CDF chain, logistic with unit scale at init.
// Each stage is u = W t + b (W positive via softplus) followed by
// t = u + a * tanh(u); the final scalar stage ends in a sigmoid.
template <typename T>
struct FactorizedPrior {
  static constexpr int kHidden = 3;

  int channels = 0;
  // Raw (pre-softplus) weights stored as per-channel 1x1 conv kernels.
  std::vector<Tensor<T>> w1, w2, w3;
  std::vector<Tensor<T>> b1, b2, b3;
  std::vector<Tensor<T>> a1, a2;

  FactorizedPrior() = default;
  FactorizedPrior(ParamStore<T>& ps, const std::string& prefix, int c) {
    channels = c;
    // softplus-inverse of the init gains 1 and 1/3
    const T g1 = T(std::log(std::exp(1.0) - 1.0));
    const T g3 = T(std::log(std::exp(1.0 / 3.0) - 1.0));
    for (int ch = 0; ch < c; ++ch) {
      const std::string p = prefix + ".ch" + std::to_string(ch);
      w1.push_back(ps.add(p + ".w1", Tensor<T>(Shape{kHidden, 1, 1, 1}, g1)));
      b1.push_back(ps.add(p + ".b1", Tensor<T>(Shape{kHidden})));
      a1.push_back(ps.add(p + ".a1", Tensor<T>(Shape{kHidden})));
      w2.push_back(
          ps.add(p + ".w2", Tensor<T>(Shape{kHidden, kHidden, 1, 1}, g3)));
      b2.push_back(ps.add(p + ".b2", Tensor<T>(Shape{kHidden})));
      a2.push_back(ps.add(p + ".a2", Tensor<T>(Shape{kHidden})));
      w3.push_back(ps.add(p + ".w3", Tensor<T>(Shape{1, kHidden, 1, 1}, g3)));
      b3.push_back(ps.add(p + ".b3", Tensor<T>(Shape{1})));
    }
  }

  // Evaluates the monotone CDF elementwise for one channel slice [1,H,W].
  Tensor<T> cdf_channel(const Tensor<T>& xc, int ch) const {
    auto u1 = add_channel_bias(conv2d(xc, softplus(w1[ch]), 1, 0), b1[ch]);
    auto t1 = add(u1, channel_scale(tanh_op(u1), a1[ch]));
    auto u2 = add_channel_bias(conv2d(t1, softplus(w2[ch]), 1, 0), b2[ch]);
    auto t2 = add(u2, channel_scale(tanh_op(u2), a2[ch]));
    auto u3 = add_channel_bias(conv2d(t2, softplus(w3[ch]), 1, 0), b3[ch]);
    return sigmoid(u3);
  }

  // p(v) = C(v + 0.5) - C(v - 0.5) per element, floored for finite logs.
  Tensor<T> likelihood(const Tensor<T>& zhat) const {
    if (zhat.dim(0) != channels)
      throw shape_error("factorized prior: channel mismatch");
    std::vector<Tensor<T>> per_channel;
    per_channel.reserve(std::size_t(channels));
    for (int ch = 0; ch < channels; ++ch) {
      auto xc = slice_channels(zhat, ch, ch + 1);
      auto hi = cdf_channel(add_scalar(xc, T(0.5)), ch);
      auto lo = cdf_channel(add_scalar(xc, T(-0.5)), ch);
      per_channel.push_back(sub(hi, lo));
    }
    return clamp_min(concat_channels(per_channel), T(kLikelihoodFloor));
  }

  // Scalar CDF evaluation for coding-table construction.
  double cdf_value(int ch, double x) const {
    double t[kHidden];
    for (int i = 0; i < kHidden; ++i) {
      const double w = std::log1p(std::exp(double(w1[ch].data()[i])));
      const double u = w * x + double(b1[ch].data()[i]);
      t[i] = u + double(a1[ch].data()[i]) * std::tanh(u);
    }
    double t2[kHidden];
    for (int i = 0; i < kHidden; ++i) {
      double u = double(b2[ch].data()[i]);
      for (int j = 0; j < kHidden; ++j) {
        const double w = std::log1p(
            std::exp(double(w2[ch].data()[std::size_t(i) * kHidden + j])));
        u += w * t[j];
      }
      t2[i] = u + double(a2[ch].data()[i]) * std::tanh(u);
    }
    double u3 = double(b3[ch].data()[0]);
    for (int j = 0; j < kHidden; ++j) {
      const double w = std::log1p(std::exp(double(w3[ch].data()[j])));
      u3 += w * t2[j];
    }
    return 1.0 / (1.0 + std::exp(-u3));
  }
};

}  // namespace dbcc
