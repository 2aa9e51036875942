#pragma once

#include <random>

#include "dbcc/codec/network.hpp"
#include "dbcc/entropy/quantize.hpp"
#include "dbcc/train/loss.hpp"

namespace dbcc {

// Differentiable rate estimate in bits: Gaussian conditionals for both
// latents (slice order fixed by the entropy model) plus the factorized
// prior for the hyper-latent.
template <typename T>
Tensor<T> estimate_rate_bits(const Model<T>& model, const Tensor<T>& y1q,
                             const Tensor<T>& y2q, const Tensor<T>& zq,
                             const Tensor<T>& fz) {
  const SliceLayout layout = slice_partition(model.cfg.M, model.cfg.G);
  Tensor<T> bits = bits_from_likelihood(model.prior.likelihood(zq));

  std::vector<Tensor<T>> y1_slices;
  for (int k = 0; k < layout.G; ++k) {
    auto params = model.charm_stage1_params(fz, y1_slices, k);
    auto s = slice_channels(y1q, layout.begin(k), layout.end(k));
    bits = add(bits, bits_from_likelihood(gaussian_likelihood(s, params)));
    y1_slices.push_back(s);
  }
  if (model.cfg.use_tb) {
    std::vector<Tensor<T>> y2_slices;
    for (int k = 0; k < layout.G; ++k) {
      auto params = model.charm_stage2_params(fz, y1q, y2_slices, k);
      auto s = slice_channels(y2q, layout.begin(k), layout.end(k));
      bits = add(bits, bits_from_likelihood(gaussian_likelihood(s, params)));
      y2_slices.push_back(s);
    }
  }
  return bits;
}

template <typename T>
struct TrainForwardResult {
  Tensor<T> loss;
  Tensor<T> bits;
  Tensor<T> xhat;  // unclamped synthesis from the noisy latents
};

// One training-mode forward pass: noise quantization throughout, R-D loss
// per the model's lambda and metric.
template <typename T>
TrainForwardResult<T> train_forward(const Model<T>& model, const Tensor<T>& x,
                                    std::mt19937_64& rng) {
  auto [y1, y2] = model.encode_branches(x);
  auto z = model.hyper_encode(y1, y2);
  auto zq = quantize_noise(z, rng);
  auto fz = model.hyper_decode(zq);
  auto y1q = quantize_noise(y1, rng);
  Tensor<T> y2q;
  if (model.cfg.use_tb) y2q = quantize_noise(y2, rng);

  TrainForwardResult<T> out;
  out.bits = estimate_rate_bits(model, y1q, y2q, zq, fz);
  out.xhat = model.synthesize(y1q, y2q);
  const std::size_t num_pixels = std::size_t(x.dim(1)) * x.dim(2);
  out.loss = rd_loss(x, out.xhat, out.bits, model.cfg.lambda,
                     model.cfg.metric, num_pixels);
  return out;
}

}  // namespace dbcc
