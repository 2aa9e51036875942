#include <cstdio>
#include <random>

#include "dbcc/codec/checkpoint.hpp"
#include "dbcc/codec/pipeline.hpp"
#include "dbcc/metrics/metrics.hpp"
#include "doctest.h"

using namespace dbcc;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.N = 8;
  cfg.M = 10;
  cfg.G = 5;
  cfg.hyper_channels = 8;
  return cfg;
}

Tensor<float> smooth_image(int h, int w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  Tensor<float> x({3, h, w});
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j)
        x.data()[(std::size_t(c) * h + i) * w + j] = float(std::clamp(
            0.5 + 0.35 * std::sin(0.06 * i + c) * std::cos(0.045 * j) +
                dist(rng),
            0.0, 1.0));
  return x;
}

}  // namespace

TEST_CASE("compress/decompress: decoded latents match encoder bit-exactly") {
  Model<float> model(tiny_config(), 3);
  auto padded = smooth_image(64, 128, 4);

  auto enc = compress_latents(model, padded);
  CHECK(enc.payload.size() > 0);
  CHECK(enc.estimated_bits > 0);

  auto dec = decompress_latents(model, enc.payload, 64, 128, 64, 128);
  CHECK(dec.latents.z_hat.values() == enc.latents.z_hat.values());
  CHECK(dec.latents.y1_hat.values() == enc.latents.y1_hat.values());
  CHECK(dec.latents.y2_hat.values() == enc.latents.y2_hat.values());
}

TEST_CASE("quantized latents are round(y - mu) + mu around the true y") {
  Model<float> model(tiny_config(), 5);
  auto padded = smooth_image(64, 64, 6);
  auto enc = compress_latents(model, padded);
  for (std::size_t i = 0; i < enc.latents.y1.size(); ++i) {
    const double d =
        double(enc.latents.y1_hat.data()[i]) - enc.latents.y1.data()[i];
    CHECK(std::abs(d) <= 0.5 + 1e-4);
  }
}

TEST_CASE("payload length tracks the rate estimate") {
  Model<float> model(tiny_config(), 7);
  for (std::uint64_t seed : {10, 11, 12}) {
    auto padded = smooth_image(128, 128, seed);
    auto enc = compress_latents(model, padded);
    const double actual_bits = 8.0 * double(enc.payload.size());
    CHECK(actual_bits >= enc.estimated_bits * 0.98 - 512.0);
    CHECK(actual_bits <= enc.estimated_bits * 1.02 + 512.0);
  }
}

TEST_CASE("stage-1 prefix bytes are a prefix of the full stream") {
  Model<float> model(tiny_config(), 8);
  auto padded = smooth_image(64, 64, 9);
  auto full = compress_latents(model, padded);
  auto stage1 = compress_stage1_bytes(model, padded);
  CHECK(stage1.size() > 0);
  CHECK(stage1.size() < full.payload.size());
}

TEST_CASE("encode_image/decode_file: container round trip with padding") {
  Model<float> model(tiny_config(), 10);
  auto img = smooth_image(100, 150, 11);  // forces reflect padding

  auto enc = encode_image(model, img);
  CHECK(enc.header.orig_width == 150);
  CHECK(enc.header.orig_height == 100);
  CHECK(enc.header.latent_channels == 10);
  CHECK(enc.header.groups == 5);
  // 0.015 is preset index 3 of the mse list.
  CHECK(enc.header.lambda_index == 3);
  CHECK(enc.header.payload_len == enc.detail.payload.size());
  CHECK(enc.bytes.size() == BitstreamHeader::kSize + enc.detail.payload.size());

  auto dec = decode_file(model, enc.bytes.data(), enc.bytes.size());
  CHECK(dec.shape() == img.shape());
  for (float v : dec.values()) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("decode PSNR equals the same-process forward-pass PSNR") {
  Model<float> model(tiny_config(), 12);
  auto img = smooth_image(64, 64, 13);

  auto enc = encode_image(model, img);
  auto dec = decode_file(model, enc.bytes.data(), enc.bytes.size());

  NoGradGuard ng;
  auto xhat = model.decode_image(enc.detail.latents.y1_hat,
                                 enc.detail.latents.y2_hat);
  CHECK(psnr(dec, img) == doctest::Approx(psnr(xhat, img)).epsilon(1e-9));
}

TEST_CASE("decode_file rejects mismatched model configs, naming the field") {
  Model<float> model(tiny_config(), 14);
  auto enc = encode_image(model, smooth_image(64, 64, 15));

  ModelConfig other = tiny_config();
  other.G = 10;
  Model<float> wrong(other, 14);
  CHECK_THROWS_WITH_AS(
      decode_file(wrong, enc.bytes.data(), enc.bytes.size()),
      doctest::Contains("G"), config_error);

  ModelConfig diff_lambda = tiny_config();
  diff_lambda.lambda = 0.0032;
  Model<float> wrong2(diff_lambda, 14);
  CHECK_THROWS_WITH_AS(
      decode_file(wrong2, enc.bytes.data(), enc.bytes.size()),
      doctest::Contains("lambda"), config_error);
}

TEST_CASE("w/o TB pipeline round trips as well") {
  ModelConfig cfg = tiny_config();
  cfg.use_tb = false;
  cfg.use_ci = false;
  Model<float> model(cfg, 16);
  auto img = smooth_image(64, 64, 17);
  auto enc = encode_image(model, img);
  auto dec = decode_file(model, enc.bytes.data(), enc.bytes.size());
  CHECK(dec.shape() == img.shape());
}

TEST_CASE("checkpoint: byte-identical save/load round trip") {
  Model<float> model(tiny_config(), 18);
  auto bytes = serialize_checkpoint(model);
  auto model2 = deserialize_checkpoint(bytes.data(), bytes.size());
  CHECK(model2.cfg.M == model.cfg.M);
  CHECK(model2.cfg.lambda == model.cfg.lambda);
  REQUIRE(model2.params.names == model.params.names);
  for (std::size_t i = 0; i < model.params.count(); ++i)
    CHECK(model2.params.tensors[i].values() ==
          model.params.tensors[i].values());
  CHECK(serialize_checkpoint(model2) == bytes);

  const std::string path = "/tmp/dbcc_test_ckpt.dbck";
  save_checkpoint(path, model);
  auto model3 = load_checkpoint(path);
  CHECK(serialize_checkpoint(model3) == bytes);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint deserialization validates its input") {
  Model<float> model(tiny_config(), 19);
  auto bytes = serialize_checkpoint(model);
  CHECK_THROWS_AS(deserialize_checkpoint(bytes.data(), 8), format_error);
  auto corrupted = bytes;
  corrupted[0] ^= 0xFF;  // magic
  CHECK_THROWS_AS(deserialize_checkpoint(corrupted.data(), corrupted.size()),
                  format_error);
}

TEST_CASE("identical weights on both sides are required: different seed fails "
          "to reproduce latents") {
  Model<float> enc_model(tiny_config(), 20);
  Model<float> dec_model(tiny_config(), 21);
  auto padded = smooth_image(64, 64, 22);
  auto enc = compress_latents(enc_model, padded);
  // Decoding with different weights still yields tensors, just not the
  // encoder's; this documents that weight agreement is the contract.
  auto dec = decompress_latents(dec_model, enc.payload, 64, 64, 64, 64);
  CHECK(dec.latents.y1_hat.values() != enc.latents.y1_hat.values());
}
