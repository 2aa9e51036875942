#pragma once

#include <cmath>
#include <cstdint>

#include "dbcc/nn/params.hpp"

namespace dbcc {

template <typename T>
struct AdamState {
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void init_like(const ParamStore<T>& params) {
    m.clear();
    v.clear();
    for (const auto& p : params.tensors) {
      m.emplace_back(p.size(), T(0));
      v.emplace_back(p.size(), T(0));
    }
    t = 0;
  }
};

// Bias-corrected Adam update over every parameter in the store; reads the
// accumulated grads, leaves them untouched (caller zeroes between steps).
template <typename T>
void adam_step(ParamStore<T>& params, AdamState<T>& state, double lr) {
  if (state.m.size() != params.count())
    throw shape_error("adam_step: state does not match parameter store");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, double(state.t));
  for (std::size_t i = 0; i < params.count(); ++i) {
    auto& p = params.tensors[i];
    if (p.grad().empty()) continue;
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != p.size())
      throw shape_error("adam_step: moment shape mismatch");
    const auto& g = p.grad();
    T* w = p.data();
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double gj = double(g[j]);
      m[j] = T(state.beta1 * double(m[j]) + (1.0 - state.beta1) * gj);
      v[j] = T(state.beta2 * double(v[j]) + (1.0 - state.beta2) * gj * gj);
      const double mhat = double(m[j]) / bc1;
      const double vhat = double(v[j]) / bc2;
      w[j] = T(double(w[j]) - lr * mhat / (std::sqrt(vhat) + state.eps));
    }
  }
}

}  // namespace dbcc
