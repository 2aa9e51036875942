#pragma once

#include <cstdint>
#include <vector>

#include "dbcc/tensor/tensor.hpp"

namespace dbcc {

// On-disk `.dbcc` container header. All multi-byte fields little-endian,
// no alignment gaps; see pack()/unpack() for the byte-exact layout.
struct BitstreamHeader {
  static constexpr char kMagic[4] = {'D', 'B', 'C', 'C'};
  static constexpr std::uint8_t kVersion = 1;
  static constexpr std::size_t kSize = 30;
  // 0xFF marks a lambda outside the preset list.
  static constexpr std::uint8_t kCustomLambda = 0xFF;

  std::uint8_t version = kVersion;
  std::uint8_t metric = 0;  // 0 = mse, 1 = ms_ssim
  std::uint8_t lambda_index = kCustomLambda;
  std::uint8_t groups = 0;
  std::uint16_t latent_channels = 0;  // M
  std::uint16_t filters = 0;          // N
  std::uint16_t hyper_channels = 0;
  std::uint32_t orig_width = 0;
  std::uint32_t orig_height = 0;
  std::uint64_t payload_len = 0;
};

std::vector<std::uint8_t> pack(const BitstreamHeader& header,
                               const std::vector<std::uint8_t>& payload);

// Validates magic/version and the payload length against the buffer.
std::pair<BitstreamHeader, std::vector<std::uint8_t>> unpack(
    const std::uint8_t* data, std::size_t size);

// Reflect-pads an image tensor [3,H,W] on the right/bottom to the next
// multiples of m; crop_after_decode inverts it exactly.
Tensor<float> pad_to_multiple(const Tensor<float>& x, int m = 64);
Tensor<float> crop_after_decode(const Tensor<float>& x, int orig_h,
                                int orig_w);

}  // namespace dbcc
