#pragma once

#include <string>
#include <vector>

#include "dbcc/common.hpp"

namespace dbcc {

enum class DistortionMetric : std::uint8_t { mse = 0, ms_ssim = 1 };

// Architecture hyperparameters shared by every module. Full scale is
// N=128, M=320; the desk-scale default keeps the same topology small
// enough to train on one CPU core.
struct ModelConfig {
  int N = 32;              // internal filter count
  int M = 40;              // latent channels per branch
  int G = 5;               // channel slices per latent
  int hyper_channels = 32;
  bool use_ci = true;      // y1 conditions the coding of y2
  bool use_tb = true;      // dual-branch encoders
  double lambda = 0.015;
  DistortionMetric metric = DistortionMetric::mse;

  int slice_channels() const { return M / G; }
  // Context feature width produced by the hyper decoder.
  int fz_channels() const { return 2 * M; }

  void validate() const {
    if (N <= 0 || M <= 0 || hyper_channels <= 0)
      throw config_error("config: channel counts must be positive");
    if (G != 5 && G != 10)
      throw config_error("config: G must be 5 or 10, got " +
                         std::to_string(G));
    if (M % G != 0)
      throw config_error("config: M must divide evenly into G slices");
    if (use_ci && !use_tb)
      throw config_error("config: use_ci requires use_tb");
    if (!(lambda > 0)) throw config_error("config: lambda must be > 0");
  }
};

// Contiguous equal partition of [0, M) into G channel slices.
struct SliceLayout {
  int M = 0;
  int G = 0;
  int channels_per_slice = 0;

  int begin(int k) const { return k * channels_per_slice; }
  int end(int k) const { return (k + 1) * channels_per_slice; }
};

inline SliceLayout slice_partition(int m, int g) {
  if (g <= 0 || m <= 0 || m % g != 0)
    throw config_error("slice_partition: M must divide evenly by G");
  return SliceLayout{m, g, m / g};
}

std::vector<double> lambda_presets(DistortionMetric metric);

}  // namespace dbcc
