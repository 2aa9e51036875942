#pragma once

#include <random>
#include <string>
#include <vector>

#include "dbcc/tensor/tensor.hpp"

namespace dbcc {

// Ordered registry of learnable tensors. Registration order is the
// serialization order of the checkpoint format, so it must be stable.
template <typename T>
struct ParamStore {
  std::vector<std::string> names;
  std::vector<Tensor<T>> tensors;

  Tensor<T> add(std::string name, Tensor<T> t) {
    t.set_requires_grad(true);
    names.push_back(std::move(name));
    tensors.push_back(t);
    return t;
  }

  Tensor<T>* find(const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return &tensors[i];
    return nullptr;
  }

  std::size_t count() const { return tensors.size(); }

  std::size_t total_elems() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.size();
    return n;
  }

  void zero_grad() {
    for (auto& t : tensors) t.zero_grad();
  }
};

// Kaiming-uniform fan-in init for conv kernels (leaky_relu gain).
template <typename T>
void kaiming_uniform(Tensor<T>& t, int fan_in, std::mt19937_64& rng,
                     double negative_slope = 0.01) {
  const double gain = std::sqrt(2.0 / (1.0 + negative_slope * negative_slope));
  const double bound = gain * std::sqrt(3.0 / double(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.values()) v = T(dist(rng));
}

template <typename T>
void fill_normal(Tensor<T>& t, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (auto& v : t.values()) v = T(dist(rng));
}

}  // namespace dbcc
