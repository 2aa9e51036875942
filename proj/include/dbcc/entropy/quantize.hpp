#pragma once

#include <random>

#include "dbcc/tensor/ops.hpp"

namespace dbcc {

// Train-mode quantizer: y + u with u ~ Uniform(-0.5, 0.5) i.i.d. The noise
// is a constant on the tape, so the gradient passes through unchanged.
template <typename T>
Tensor<T> quantize_noise(const Tensor<T>& y, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<T> out(y.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = y.data()[i] + T(dist(rng));
  return make_result<T>(y.shape(), std::move(out), {y},
                        [](TensorNode<T>& n) {
                          if (!n.parents[0]->requires_grad) return;
                          detail::axpy(n.grad.size(), T(1), n.grad.data(),
                                       n.parents[0]->ensure_grad().data());
                        });
}

// Code-mode quantizer: round(y - mu) + mu. Not differentiable; used on the
// coding path only, where nothing is on the tape.
template <typename T>
Tensor<T> quantize_round(const Tensor<T>& y, const Tensor<T>& mu) {
  if (y.shape() != mu.shape())
    throw shape_error("quantize_round: shape mismatch");
  Tensor<T> out(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const T m = mu.data()[i];
    out.data()[i] = T(std::nearbyint(double(y.data()[i] - m))) + m;
  }
  return out;
}

template <typename T>
Tensor<T> quantize_round(const Tensor<T>& y) {
  Tensor<T> out(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i)
    out.data()[i] = T(std::nearbyint(double(y.data()[i])));
  return out;
}

}  // namespace dbcc
