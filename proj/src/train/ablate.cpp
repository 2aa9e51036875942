#include "dbcc/train/ablate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "dbcc/codec/checkpoint.hpp"
#include "dbcc/metrics/metrics.hpp"

namespace dbcc {

EvalRow evaluate_image(const Model<float>& model, const Tensor<float>& image,
                       const std::string& name) {
  NoGradGuard ng;
  auto enc = encode_image(model, image);
  auto dec = decode_file(model, enc.bytes.data(), enc.bytes.size());

  EvalRow row;
  row.image = name;
  row.bpp = 8.0 * double(enc.header.payload_len) /
            (double(image.dim(1)) * image.dim(2));
  row.psnr_db = psnr(dec, image);
  row.msssim_db = std::min(image.dim(1), image.dim(2)) >= 160
                      ? msssim_db(ms_ssim(dec, image))
                      : std::numeric_limits<double>::quiet_NaN();
  return row;
}

namespace {

AblateRow eval_variant(const std::string& variant, const Model<float>& model,
                       const std::vector<Tensor<float>>& eval_images) {
  AblateRow row;
  row.variant = variant;
  row.model_bytes = serialize_checkpoint(model).size();
  double msssim_sum = 0;
  int msssim_n = 0;
  for (const auto& img : eval_images) {
    auto e = evaluate_image(model, img, "");
    row.bpp += e.bpp;
    row.psnr_db += e.psnr_db;
    if (std::isfinite(e.msssim_db)) {
      msssim_sum += e.msssim_db;
      ++msssim_n;
    }
  }
  const double n = double(eval_images.size());
  row.bpp /= n;
  row.psnr_db /= n;
  row.msssim_db = msssim_n ? msssim_sum / msssim_n
                           : std::numeric_limits<double>::quiet_NaN();
  return row;
}

Model<float> train_variant(const ModelConfig& cfg, const TrainConfig& tc,
                           const PatchDataset& data) {
  Model<float> model(cfg, tc.seed);
  train_loop(tc, model, data, "", "");
  return model;
}

}  // namespace

std::vector<AblateRow> run_ablation(const std::vector<std::string>& variants,
                                    const PatchDataset& train_data,
                                    const std::vector<Tensor<float>>& eval_images,
                                    const TrainConfig& base_tc,
                                    const ModelConfig& base_cfg) {
  bool want_ci = false, want_tb = false, want_groups = false;
  for (const auto& v : variants) {
    if (v == "ci")
      want_ci = true;
    else if (v == "tb")
      want_tb = true;
    else if (v == "groups")
      want_groups = true;
    else
      throw config_error("ablate: unknown variant '" + v +
                         "' (expected ci, tb, or groups)");
  }
  if (eval_images.empty()) throw data_error("ablate: no evaluation images");

  std::vector<AblateRow> rows;
  auto full = train_variant(base_cfg, base_tc, train_data);
  rows.push_back(eval_variant("full", full, eval_images));

  if (want_ci) {
    ModelConfig cfg = base_cfg;
    cfg.use_ci = false;
    rows.push_back(
        eval_variant("wo_ci", train_variant(cfg, base_tc, train_data),
                     eval_images));
  }
  if (want_tb) {
    ModelConfig cfg = base_cfg;
    cfg.use_tb = false;
    cfg.use_ci = false;  // CI has no meaning without the second branch
    rows.push_back(
        eval_variant("wo_tb", train_variant(cfg, base_tc, train_data),
                     eval_images));
  }
  if (want_groups) {
    // The base config is the 5-slice point of the pair; report it under
    // its group name rather than training an identical model twice.
    auto g5 = rows.front();
    g5.variant = "groups5";
    rows.push_back(g5);
    ModelConfig cfg = base_cfg;
    cfg.G = 10;
    rows.push_back(
        eval_variant("groups10", train_variant(cfg, base_tc, train_data),
                     eval_images));
  }
  return rows;
}

void write_ablate_csv(const std::string& path,
                      const std::vector<AblateRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw data_error("ablate: cannot open " + path);
  out << "variant,bpp,psnr_db,msssim_db,model_bytes\n";
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%s,%.6f,%.4f,%.4f,%llu\n",
                  r.variant.c_str(), r.bpp, r.psnr_db, r.msssim_db,
                  (unsigned long long)r.model_bytes);
    out << line;
  }
}

}  // namespace dbcc
