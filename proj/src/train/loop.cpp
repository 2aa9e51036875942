#include "dbcc/train/loop.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dbcc/codec/checkpoint.hpp"
#include "dbcc/metrics/metrics.hpp"
#include "dbcc/tensor/adam.hpp"
#include "dbcc/train/forward.hpp"
#include "dbcc/train/schedule.hpp"

namespace dbcc {

TrainResult train_loop(const TrainConfig& tc, Model<float>& model,
                       const PatchDataset& data,
                       const std::string& checkpoint_path,
                       const std::string& log_csv_path) {
  tc.validate();
  model.cfg.validate();
  if (data.patches.empty()) throw data_error("train: empty dataset");
  for (const auto& p : data.patches)
    if (p.dim(1) != tc.patch || p.dim(2) != tc.patch)
      throw shape_error("train: dataset patch size does not match config");

  std::ofstream log;
  if (!log_csv_path.empty()) {
    log.open(log_csv_path, std::ios::trunc);
    if (!log) throw data_error("train: cannot open log file " + log_csv_path);
    log << "iter,loss,bpp,psnr\n";
  }

  AdamState<float> adam;
  adam.init_like(model.params);
  const std::size_t num_pixels = std::size_t(tc.patch) * tc.patch;

  TrainResult res;
  res.log.reserve(std::size_t(tc.total_iters - tc.start_iter));
  for (std::int64_t iter = tc.start_iter; iter < tc.total_iters; ++iter) {
    std::mt19937_64 rng(mix_seed(tc.seed, std::uint64_t(iter)));
    std::uniform_int_distribution<std::size_t> pick(0,
                                                    data.patches.size() - 1);

    model.params.zero_grad();
    Tensor<float> loss;
    double bits_total = 0;
    double psnr_last = 0;
    for (int b = 0; b < tc.batch; ++b) {
      const auto& x = data.patches[pick(rng)];
      auto fwd = train_forward(model, x, rng);
      bits_total += double(fwd.bits.item());
      loss = b == 0 ? fwd.loss : add(loss, fwd.loss);
      if (b == tc.batch - 1) {
        NoGradGuard ng;
        psnr_last = psnr(clamp(fwd.xhat, 0.0f, 1.0f), x);
      }
    }
    loss = mul_scalar(loss, 1.0f / float(tc.batch));

    const double loss_value = double(loss.item());
    const double lr = lr_schedule(iter, tc.lr0, tc.total_iters);
    if (!std::isfinite(loss_value))
      throw data_error("train: non-finite loss at iter " +
                       std::to_string(iter) + " (lambda " +
                       std::to_string(tc.lambda) + ", lr " +
                       std::to_string(lr) + ")");

    loss.backward();
    adam_step(model.params, adam, lr);

    const double bpp = bits_total / double(tc.batch) / double(num_pixels);
    res.log.push_back({iter, loss_value, bpp, psnr_last});
    if (log) {
      char line[128];
      std::snprintf(line, sizeof line, "%lld,%.6f,%.6f,%.4f\n",
                    (long long)iter, loss_value, bpp, psnr_last);
      log << line;
    }
    if (!checkpoint_path.empty() && tc.checkpoint_every > 0 &&
        (iter + 1) % tc.checkpoint_every == 0)
      save_checkpoint(checkpoint_path, model);
  }
  if (!checkpoint_path.empty()) save_checkpoint(checkpoint_path, model);
  return res;
}

}  // namespace dbcc
