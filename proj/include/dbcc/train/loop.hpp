#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbcc/codec/network.hpp"
#include "dbcc/train/dataset.hpp"

namespace dbcc {

struct TrainConfig {
  double lambda = 0.015;
  DistortionMetric metric = DistortionMetric::mse;
  int batch = 8;
  int patch = 64;
  std::int64_t total_iters = 2000;
  double lr0 = 1e-4;
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = 0;  // 0 = checkpoint at end only
  std::int64_t start_iter = 0;        // nonzero when resuming

  void validate() const {
    if (!(lambda > 0)) throw config_error("train: lambda must be > 0");
    if (batch <= 0) throw config_error("train: batch must be positive");
    if (patch <= 0 || patch % 64 != 0)
      throw config_error("train: patch must be a positive multiple of 64");
    if (metric == DistortionMetric::ms_ssim && patch < 192)
      throw config_error("train: ms_ssim metric needs patch >= 192");
    if (total_iters <= 0 || start_iter < 0 || start_iter >= total_iters)
      throw config_error("train: bad iteration range");
  }
};

struct TrainLogRow {
  std::int64_t iter = 0;
  double loss = 0;
  double bpp = 0;
  double psnr = 0;
};

struct TrainResult {
  std::vector<TrainLogRow> log;
};

// Per-iteration: forward under noise quantization, R-D loss, backward,
// Adam step with the halving lr schedule. Batch sampling and quantization
// noise are derived statelessly from (seed, iter), so resuming from a
// checkpoint at start_iter reproduces the original trajectory.
// NaN loss aborts with a diagnostic. Empty paths disable the checkpoint /
// CSV log outputs.
TrainResult train_loop(const TrainConfig& tc, Model<float>& model,
                       const PatchDataset& data,
                       const std::string& checkpoint_path,
                       const std::string& log_csv_path);

}  // namespace dbcc
