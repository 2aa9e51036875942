#pragma once

#include <cstdint>
#include <vector>

#include "dbcc/bitstream/container.hpp"
#include "dbcc/codec/network.hpp"

namespace dbcc {

// Continuous and code-mode quantized latents for one image.
struct LatentBundle {
  Tensor<float> y1, y2, z;
  Tensor<float> y1_hat, y2_hat, z_hat;
};

struct CompressResult {
  std::vector<std::uint8_t> payload;
  LatentBundle latents;
  // -sum log2 p over the coded symbols, using the same snapped scales and
  // prior as the coder. The payload length tracks this within the coder's
  // renormalization overhead.
  double estimated_bits = 0;
};

struct DecompressResult {
  Tensor<float> image;  // [3,H,W] clamped to [0,1], cropped to orig dims
  LatentBundle latents; // quantized forms only
};

// Per-channel factorized-prior coding tables for the hyper-latent. Encoder
// and decoder rebuild them from the same weights through the same code.
std::vector<QuantizedCdf> prior_cdf_tables(const Model<float>& model);

// Codes z, then y1 slices 0..G-1, then y2 slices 0..G-1 into one
// continuous range-coded payload. `padded` must be [3,H,W] with H,W
// multiples of 64 and pixels in [0,1].
CompressResult compress_latents(const Model<float>& model,
                                const Tensor<float>& padded);

// Exact inverse of compress_latents given identical model weights.
DecompressResult decompress_latents(const Model<float>& model,
                                    const std::vector<std::uint8_t>& payload,
                                    int padded_h, int padded_w,
                                    int orig_h, int orig_w);

// z + y1 portion coded and flushed on its own; used to verify that the
// y1 coding path is independent of the conditional-information flag.
std::vector<std::uint8_t> compress_stage1_bytes(const Model<float>& model,
                                                const Tensor<float>& padded);

// Whole-file helpers around the .dbcc container.
struct EncodedFile {
  BitstreamHeader header;
  std::vector<std::uint8_t> bytes;  // header + payload
  CompressResult detail;
};

EncodedFile encode_image(const Model<float>& model, const Tensor<float>& image);
Tensor<float> decode_file(const Model<float>& model, const std::uint8_t* data,
                          std::size_t size);

// Throws config_error naming the first mismatched field.
void check_header_matches(const BitstreamHeader& h, const ModelConfig& cfg);

}  // namespace dbcc
