#pragma once

#include <cstdint>
#include <vector>

#include "dbcc/entropy/quantized_cdf.hpp"

namespace dbcc {

// Byte-oriented range coder, 32-bit state with carry propagation and 8-bit
// renormalization. Integer-only: all float-to-integer conversion happens
// in QuantizedCdf construction, so payload bytes depend only on (symbols,
// tables, order). Out-of-support values are coded as an escape symbol
// followed by a 32-bit sign-magnitude raw bypass, which makes every
// integer losslessly codable.
class RangeEncoder {
 public:
  // cum/freq are 16-bit-precision table entries.
  void encode(std::uint32_t cum, std::uint32_t freq);
  void encode_raw_bits(std::uint32_t value, int nbits);

  // Symbol-level API over a quantized table.
  void encode_value(const QuantizedCdf& cdf, int v);

  std::vector<std::uint8_t> finish();
  std::size_t bytes_emitted() const { return out_.size(); }

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  RangeDecoder(const std::uint8_t* data, std::size_t size);

  std::uint32_t decode_raw_bits(int nbits);
  int decode_value(const QuantizedCdf& cdf);

  std::size_t bytes_consumed() const { return pos_; }

 private:
  std::uint8_t next_byte();
  void normalize();

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

}  // namespace dbcc
