#pragma once

#include "dbcc/nn/params.hpp"
#include "dbcc/tensor/conv.hpp"
#include "dbcc/tensor/ops.hpp"

namespace dbcc {

inline constexpr double kLeakySlope = 0.01;

template <typename T>
struct Conv2dLayer {
  Tensor<T> w, b;
  int stride = 1, pad = 0;

  Conv2dLayer() = default;
  Conv2dLayer(ParamStore<T>& ps, const std::string& prefix, int cin, int cout,
              int k, int stride_, std::mt19937_64& rng)
      : stride(stride_), pad(k / 2) {
    w = ps.add(prefix + ".w", Tensor<T>(Shape{cout, cin, k, k}));
    kaiming_uniform(w, cin * k * k, rng);
    b = ps.add(prefix + ".b", Tensor<T>(Shape{cout}));
  }

  Tensor<T> operator()(const Tensor<T>& x) const {
    return add_channel_bias(conv2d(x, w, stride, pad), b);
  }
};

template <typename T>
struct Deconv2dLayer {
  Tensor<T> w, b;
  int stride = 2, pad = 1, output_pad = 1;

  Deconv2dLayer() = default;
  Deconv2dLayer(ParamStore<T>& ps, const std::string& prefix, int cin,
                int cout, int k, int stride_, std::mt19937_64& rng)
      : stride(stride_), pad(k / 2), output_pad(stride_ - 1) {
    w = ps.add(prefix + ".w", Tensor<T>(Shape{cin, cout, k, k}));
    kaiming_uniform(w, cin * k * k, rng);
    b = ps.add(prefix + ".b", Tensor<T>(Shape{cout}));
  }

  Tensor<T> operator()(const Tensor<T>& x) const {
    return add_channel_bias(transposed_conv2d(x, w, stride, pad, output_pad),
                            b);
  }
};

// x + conv2(leaky_relu(conv1(x))), shape-preserving.
template <typename T>
struct ResidualBlock {
  Conv2dLayer<T> conv1, conv2;

  ResidualBlock() = default;
  ResidualBlock(ParamStore<T>& ps, const std::string& prefix, int channels,
                int k, std::mt19937_64& rng)
      : conv1(ps, prefix + ".conv1", channels, channels, k, 1, rng),
        conv2(ps, prefix + ".conv2", channels, channels, k, 1, rng) {
    // Dampen the residual branch so deep stacks of blocks start close to
    // identity; full-variance branches compound to huge activations.
    for (auto& v : conv2.w.values()) v *= T(0.1);
  }

  Tensor<T> operator()(const Tensor<T>& x) const {
    return add(x, conv2(leaky_relu(conv1(x), T(kLeakySlope))));
  }
};

// Four residual blocks in series with an outer skip:
// x + RB4(RB3(RB2(RB1(x)))).
template <typename T>
struct ResidualGroup {
  std::vector<ResidualBlock<T>> blocks;

  ResidualGroup() = default;
  ResidualGroup(ParamStore<T>& ps, const std::string& prefix, int channels,
                std::mt19937_64& rng) {
    for (int i = 0; i < 4; ++i)
      blocks.emplace_back(ps, prefix + ".rb" + std::to_string(i), channels, 3,
                          rng);
  }

  Tensor<T> operator()(const Tensor<T>& x) const {
    Tensor<T> y = x;
    for (const auto& rb : blocks) y = rb(y);
    return add(x, y);
  }
};

// Simplified attention: x + trunk(x) * sigmoid(mask(x)); trunk is three
// residual blocks, mask three residual blocks followed by a 1x1 conv.
template <typename T>
struct AttentionBlock {
  std::vector<ResidualBlock<T>> trunk;
  std::vector<ResidualBlock<T>> mask;
  Conv2dLayer<T> mask_proj;

  AttentionBlock() = default;
  AttentionBlock(ParamStore<T>& ps, const std::string& prefix, int channels,
                 std::mt19937_64& rng) {
    for (int i = 0; i < 3; ++i) {
      trunk.emplace_back(ps, prefix + ".trunk" + std::to_string(i), channels,
                         3, rng);
      mask.emplace_back(ps, prefix + ".mask" + std::to_string(i), channels, 3,
                        rng);
    }
    mask_proj = Conv2dLayer<T>(ps, prefix + ".mask_proj", channels, channels,
                               1, 1, rng);
  }

  Tensor<T> operator()(const Tensor<T>& x) const {
    Tensor<T> t = x;
    for (const auto& rb : trunk) t = rb(t);
    Tensor<T> m = x;
    for (const auto& rb : mask) m = rb(m);
    m = sigmoid(mask_proj(m));
    return add(x, mul(t, m));
  }
};

// Stride-2 conv (k = 1 or 3) followed by leaky_relu; halves spatial dims.
template <typename T>
struct Downsample {
  Conv2dLayer<T> conv;

  Downsample() = default;
  Downsample(ParamStore<T>& ps, const std::string& prefix, int cin, int cout,
             int k, std::mt19937_64& rng)
      : conv(ps, prefix, cin, cout, k, 2, rng) {}

  Tensor<T> operator()(const Tensor<T>& x) const {
    if (x.dim(1) % 2 != 0 || x.dim(2) % 2 != 0)
      throw shape_error("downsample: spatial dims must be even");
    return leaky_relu(conv(x), T(kLeakySlope));
  }
};

// Stride-2 transposed conv (k=3) with optional trailing activation; exact
// x2 spatial upsampling.
template <typename T>
struct Upsample {
  Deconv2dLayer<T> deconv;
  bool activate = true;

  Upsample() = default;
  Upsample(ParamStore<T>& ps, const std::string& prefix, int cin, int cout,
           std::mt19937_64& rng, bool activate_ = true)
      : deconv(ps, prefix, cin, cout, 3, 2, rng), activate(activate_) {}

  Tensor<T> operator()(const Tensor<T>& x) const {
    Tensor<T> y = deconv(x);
    return activate ? leaky_relu(y, T(kLeakySlope)) : y;
  }
};

}  // namespace dbcc
