#pragma once

#include "dbcc/codec/config.hpp"
#include "dbcc/entropy/quantized_cdf.hpp"
#include "dbcc/entropy/scale_table.hpp"
#include "dbcc/nn/blocks.hpp"

namespace dbcc {

// Per-slice Gaussian parameters produced by the ChARM networks.
template <typename T>
struct GaussianParams {
  Tensor<T> mu;
  Tensor<T> sigma;  // clamped to [0.11, 256]
};

// One slice-parameter network: three 3x3 convs with leaky_relu between,
// final layer emitting 2*c channels split into mu and a softplus sigma.
template <typename T>
struct CharmNet {
  Conv2dLayer<T> c1, c2, c3;
  int out_channels = 0;

  CharmNet() = default;
  CharmNet(ParamStore<T>& ps, const std::string& prefix, int cin, int h1,
           int h2, int c, std::mt19937_64& rng)
      : c1(ps, prefix + ".c1", cin, h1, 3, 1, rng),
        c2(ps, prefix + ".c2", h1, h2, 3, 1, rng),
        c3(ps, prefix + ".c3", h2, 2 * c, 3, 1, rng),
        out_channels(c) {}

  GaussianParams<T> operator()(const Tensor<T>& input) const {
    auto h = leaky_relu(c1(input), T(kLeakySlope));
    h = leaky_relu(c2(h), T(kLeakySlope));
    auto raw = c3(h);
    GaussianParams<T> p;
    p.mu = slice_channels(raw, 0, out_channels);
    p.sigma = clamp(softplus(slice_channels(raw, out_channels,
                                            2 * out_channels)),
                    T(kSigmaMin), T(kSigmaMax));
    return p;
  }
};

// Discretized Gaussian likelihood per element:
// p = Phi((v-mu+0.5)/sigma) - Phi((v-mu-0.5)/sigma), floored at 2^-24.
template <typename T>
Tensor<T> gaussian_likelihood(const Tensor<T>& v, const GaussianParams<T>& p) {
  auto centered = sub(v, p.mu);
  auto hi = normal_cdf(div(add_scalar(centered, T(0.5)), p.sigma));
  auto lo = normal_cdf(div(add_scalar(centered, T(-0.5)), p.sigma));
  return clamp_min(sub(hi, lo), T(kLikelihoodFloor));
}

// -sum(log2 p); differentiable when its inputs are on the tape.
template <typename T>
Tensor<T> bits_from_likelihood(const Tensor<T>& p) {
  constexpr double inv_ln2 = 1.4426950408889634074;
  return mul_scalar(sum(log_op(p)), T(-inv_ln2));
}

}  // namespace dbcc
