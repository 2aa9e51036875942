// dbcc: dual-branch learned image codec command line tool.
//
// Subcommands: train, encode, decode, eval, ablate.
// Exit codes: 0 success, 2 usage/config error, 3 data/format error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbcc/codec/checkpoint.hpp"
#include "dbcc/codec/pipeline.hpp"
#include "dbcc/io/image.hpp"
#include "dbcc/metrics/metrics.hpp"
#include "dbcc/train/ablate.hpp"
#include "dbcc/train/loop.hpp"

namespace fs = std::filesystem;
using namespace dbcc;

namespace {

void require_readable(const std::string& path, const char* what) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw config_error(std::string(what) + " not readable: " + path);
}

void apply_config_json(const std::string& path, ModelConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw config_error("config file not readable: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config file " + path + ": " + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "N")
        cfg.N = value.get<int>();
      else if (key == "M")
        cfg.M = value.get<int>();
      else if (key == "G")
        cfg.G = value.get<int>();
      else if (key == "hyper_channels")
        cfg.hyper_channels = value.get<int>();
      else if (key == "use_ci")
        cfg.use_ci = value.get<bool>();
      else if (key == "use_tb")
        cfg.use_tb = value.get<bool>();
      else
        throw config_error("config file " + path + ": unknown key '" + key +
                           "'");
    } catch (const nlohmann::json::exception& e) {
      throw config_error("config file " + path + ", key '" + key +
                         "': " + e.what());
    }
  }
}

void check_lambda_preset(double lambda, DistortionMetric metric,
                         bool allow_custom) {
  if (allow_custom) return;
  for (double p : lambda_presets(metric))
    if (std::abs(lambda - p) <= 1e-12) return;
  throw config_error(
      "lambda " + std::to_string(lambda) +
      " is not a preset for this metric; pass --allow-custom to override");
}

std::vector<std::string> list_images(const std::string& dir) {
  if (!fs::is_directory(dir)) throw config_error("not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    auto ext = e.path().extension().string();
    if (ext == ".png" || ext == ".ppm") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw data_error("no .png/.ppm images in " + dir);
  return out;
}

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"dbcc: dual-branch learned image codec"};
  app.require_subcommand(1);

  // ---- train ----
  auto* train = app.add_subcommand("train", "Train a model");
  std::string tr_data, tr_out, tr_log, tr_resume, tr_config, tr_metric = "mse";
  TrainConfig tc;
  std::int64_t tr_patches = 0;
  bool tr_allow_custom = false, tr_no_augment = false;
  train->add_option("--data", tr_data, "Training image directory")->required();
  train->add_option("--out", tr_out, "Output checkpoint path")->required();
  train->add_option("--lambda", tc.lambda, "Rate-distortion tradeoff");
  train->add_option("--metric", tr_metric, "mse or ms_ssim")
      ->check(CLI::IsMember({"mse", "ms_ssim"}));
  train->add_option("--iters", tc.total_iters, "Total iterations");
  train->add_option("--batch", tc.batch, "Batch size");
  train->add_option("--patch", tc.patch, "Patch size (multiple of 64)");
  train->add_option("--lr", tc.lr0, "Initial learning rate");
  train->add_option("--seed", tc.seed, "RNG seed");
  train->add_option("--patches", tr_patches,
                    "Dataset patches to extract (default 16*batch)");
  train->add_option("--checkpoint-every", tc.checkpoint_every,
                    "Checkpoint interval in iterations (0: end only)");
  train->add_option("--log", tr_log, "Training log CSV path");
  train->add_option("--resume", tr_resume, "Checkpoint to resume from");
  train->add_option("--config", tr_config, "JSON with ModelConfig overrides");
  train->add_flag("--allow-custom", tr_allow_custom,
                  "Accept a lambda outside the preset list");
  train->add_flag("--no-augment", tr_no_augment,
                  "Disable dataset augmentation");

  // ---- encode ----
  auto* encode = app.add_subcommand("encode", "Encode an image to .dbcc");
  std::string en_model, en_in, en_out;
  encode->add_option("--model", en_model, "Checkpoint path")->required();
  encode->add_option("--in", en_in, "Input PNG/PPM image")->required();
  encode->add_option("--out", en_out, "Output .dbcc path")->required();

  // ---- decode ----
  auto* decode = app.add_subcommand("decode", "Decode a .dbcc to an image");
  std::string de_model, de_in, de_out;
  decode->add_option("--model", de_model, "Checkpoint path")->required();
  decode->add_option("--in", de_in, "Input .dbcc path")->required();
  decode->add_option("--out", de_out, "Output PNG/PPM path")->required();

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Rate-distortion over a directory");
  std::string ev_model, ev_data, ev_out;
  eval->add_option("--model", ev_model, "Checkpoint path")->required();
  eval->add_option("--data", ev_data, "Image directory")->required();
  eval->add_option("--out", ev_out, "Output CSV path")->required();

  // ---- ablate ----
  auto* ablate = app.add_subcommand("ablate", "Train/evaluate variant matrix");
  std::string ab_data, ab_eval, ab_out, ab_variants = "ci,tb,groups";
  std::string ab_config;
  TrainConfig ab_tc;
  ab_tc.total_iters = 300;
  ablate->add_option("--data", ab_data, "Training image directory")
      ->required();
  ablate->add_option("--eval", ab_eval,
                     "Evaluation image directory (default: --data)");
  ablate->add_option("--out", ab_out, "Output CSV path")->required();
  ablate->add_option("--variants", ab_variants,
                     "Comma list from {ci, tb, groups}");
  ablate->add_option("--iters", ab_tc.total_iters, "Iterations per variant");
  ablate->add_option("--lambda", ab_tc.lambda, "Rate-distortion tradeoff");
  ablate->add_option("--batch", ab_tc.batch, "Batch size");
  ablate->add_option("--patch", ab_tc.patch, "Patch size (multiple of 64)");
  ablate->add_option("--seed", ab_tc.seed, "RNG seed");
  ablate->add_option("--config", ab_config, "JSON with ModelConfig overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help exits 0; parse failures are usage errors
  }

  if (*train) {
    tc.metric =
        tr_metric == "mse" ? DistortionMetric::mse : DistortionMetric::ms_ssim;
    check_lambda_preset(tc.lambda, tc.metric, tr_allow_custom);
    tc.validate();

    Model<float> model = [&] {
      if (!tr_resume.empty()) {
        require_readable(tr_resume, "checkpoint");
        return load_checkpoint(tr_resume);
      }
      ModelConfig cfg;
      if (!tr_config.empty()) apply_config_json(tr_config, cfg);
      cfg.lambda = tc.lambda;
      cfg.metric = tc.metric;
      cfg.validate();
      return Model<float>(cfg, tc.seed);
    }();
    if (!tr_resume.empty()) {
      model.cfg.lambda = tc.lambda;
      model.cfg.metric = tc.metric;
    }

    if (!fs::is_directory(tr_data))
      throw config_error("not a directory: " + tr_data);
    const std::int64_t n_patches =
        tr_patches > 0 ? tr_patches : std::int64_t(16) * tc.batch;
    auto data = make_patches(tr_data, tc.patch, int(n_patches), tc.seed,
                             !tr_no_augment);
    auto res = train_loop(tc, model, data, tr_out, tr_log);
    if (!res.log.empty()) {
      const auto& last = res.log.back();
      std::printf("iter %lld loss %.6f bpp %.6f psnr %.4f\n",
                  (long long)last.iter, last.loss, last.bpp, last.psnr);
    }
    std::printf("checkpoint written to %s\n", tr_out.c_str());
    return 0;
  }

  if (*encode) {
    require_readable(en_model, "model");
    require_readable(en_in, "input image");
    auto model = load_checkpoint(en_model);
    auto img = load_image(en_in);
    auto enc = encode_image(model, img);
    std::ofstream out(en_out, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open output: " + en_out);
    out.write(reinterpret_cast<const char*>(enc.bytes.data()),
              std::streamsize(enc.bytes.size()));
    if (!out) throw data_error("write failed: " + en_out);
    const double bpp = 8.0 * double(enc.header.payload_len) /
                       (double(img.dim(2)) * img.dim(1));
    std::printf("%s: %zu bytes, %.6f bpp\n", en_out.c_str(),
                enc.bytes.size(), bpp);
    return 0;
  }

  if (*decode) {
    require_readable(de_model, "model");
    require_readable(de_in, "input bitstream");
    auto model = load_checkpoint(de_model);
    std::ifstream in(de_in, std::ios::binary);
    std::vector<std::uint8_t> bytes(
        (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto img = decode_file(model, bytes.data(), bytes.size());
    save_image(de_out, img);
    std::printf("%s: %lldx%lld\n", de_out.c_str(), (long long)img.dim(2),
                (long long)img.dim(1));
    return 0;
  }

  if (*eval) {
    require_readable(ev_model, "model");
    auto model = load_checkpoint(ev_model);
    auto paths = list_images(ev_data);
    std::ofstream out(ev_out, std::ios::trunc);
    if (!out) throw data_error("cannot open output: " + ev_out);
    out << "image,bpp,psnr_db,msssim_db\n";
    double bpp_sum = 0, psnr_sum = 0, ms_sum = 0;
    int ms_n = 0;
    for (const auto& p : paths) {
      auto row = evaluate_image(model, load_image(p),
                                fs::path(p).filename().string());
      char line[512];
      std::snprintf(line, sizeof line, "%s,%.6f,%.4f,%.4f\n",
                    row.image.c_str(), row.bpp, row.psnr_db, row.msssim_db);
      out << line;
      std::fputs(line, stdout);
      bpp_sum += row.bpp;
      psnr_sum += row.psnr_db;
      if (std::isfinite(row.msssim_db)) {
        ms_sum += row.msssim_db;
        ++ms_n;
      }
    }
    const double n = double(paths.size());
    char line[512];
    std::snprintf(line, sizeof line, "average,%.6f,%.4f,%.4f\n", bpp_sum / n,
                  psnr_sum / n,
                  ms_n ? ms_sum / ms_n
                       : std::numeric_limits<double>::quiet_NaN());
    out << line;
    std::fputs(line, stdout);
    return 0;
  }

  // ablate
  if (!ab_eval.empty()) {
    // keep
  } else {
    ab_eval = ab_data;
  }
  ab_tc.validate();
  ModelConfig cfg;
  if (!ab_config.empty()) apply_config_json(ab_config, cfg);
  cfg.lambda = ab_tc.lambda;
  cfg.metric = ab_tc.metric;
  cfg.validate();

  auto variants = split_csv_list(ab_variants);
  if (!fs::is_directory(ab_data))
    throw config_error("not a directory: " + ab_data);
  auto data = make_patches(ab_data, ab_tc.patch, 16 * ab_tc.batch, ab_tc.seed,
                           true);
  std::vector<Tensor<float>> eval_images;
  for (const auto& p : list_images(ab_eval))
    eval_images.push_back(load_image(p));
  auto rows = run_ablation(variants, data, eval_images, ab_tc, cfg);
  write_ablate_csv(ab_out, rows);
  for (const auto& r : rows)
    std::printf("%s: bpp %.6f psnr %.4f msssim_db %.4f model %llu bytes\n",
                r.variant.c_str(), r.bpp, r.psnr_db, r.msssim_db,
                (unsigned long long)r.model_bytes);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const shape_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const format_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const data_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}
