#pragma once

#include <string>
#include <vector>

#include "dbcc/codec/pipeline.hpp"
#include "dbcc/train/loop.hpp"

namespace dbcc {

struct EvalRow {
  std::string image;
  double bpp = 0;
  double psnr_db = 0;
  double msssim_db = 0;  // NaN when the image is too small for 5 scales
};

// Full encode -> decode round trip through the real coder; bpp comes from
// the payload length, quality from the decoded image.
EvalRow evaluate_image(const Model<float>& model, const Tensor<float>& image,
                       const std::string& name);

struct AblateRow {
  std::string variant;
  double bpp = 0;
  double psnr_db = 0;
  double msssim_db = 0;
  std::uint64_t model_bytes = 0;
};

// Trains and evaluates the variant matrix at the given desk scale.
// `variants` holds tokens from {ci, tb, groups}: ci adds a w/o-CI row,
// tb a w/o-TB row, groups a 5-vs-10-slices pair. The full model row is
// always present (and doubles as the groups=5 row).
std::vector<AblateRow> run_ablation(const std::vector<std::string>& variants,
                                    const PatchDataset& train_data,
                                    const std::vector<Tensor<float>>& eval_images,
                                    const TrainConfig& base_tc,
                                    const ModelConfig& base_cfg);

void write_ablate_csv(const std::string& path,
                      const std::vector<AblateRow>& rows);

}  // namespace dbcc
