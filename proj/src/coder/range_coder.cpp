#include "dbcc/coder/range_coder.hpp"

#include <algorithm>

#include "dbcc/common.hpp"

namespace dbcc {

namespace {
constexpr std::uint32_t kTopValue = 1u << 24;
constexpr std::uint32_t kSignBit = 0x80000000u;
}  // namespace

void RangeEncoder::shift_low() {
  if (std::uint32_t(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    std::uint8_t carry = std::uint8_t(low_ >> 32);
    std::uint8_t temp = cache_;
    do {
      out_.push_back(std::uint8_t(temp + carry));
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = std::uint8_t(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ << 8) & 0xFFFFFFFFull;
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq) {
  const std::uint32_t r = range_ >> kCdfPrecision;
  low_ += std::uint64_t(r) * cum;
  range_ = r * freq;
  while (range_ < kTopValue) {
    shift_low();
    range_ <<= 8;
  }
}

void RangeEncoder::encode_raw_bits(std::uint32_t value, int nbits) {
  while (nbits > 0) {
    const int chunk = std::min(nbits, kCdfPrecision);
    const std::uint32_t v = (value >> (nbits - chunk)) & ((1u << chunk) - 1);
    const std::uint32_t r = range_ >> chunk;
    low_ += std::uint64_t(r) * v;
    range_ = r;
    while (range_ < kTopValue) {
      shift_low();
      range_ <<= 8;
    }
    nbits -= chunk;
  }
}

void RangeEncoder::encode_value(const QuantizedCdf& cdf, int v) {
  if (cdf.in_support(v)) {
    const int idx = cdf.index_of(v);
    encode(cdf.cum[std::size_t(idx)], cdf.freq[std::size_t(idx)]);
    return;
  }
  const int esc = cdf.escape_index();
  encode(cdf.cum[std::size_t(esc)], cdf.freq[std::size_t(esc)]);
  const std::uint32_t mag =
      std::uint32_t(std::min<std::int64_t>(std::abs(std::int64_t(v)),
                                           kSignBit - 1));
  encode_raw_bits((v < 0 ? kSignBit : 0u) | mag, 32);
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(const std::uint8_t* data, std::size_t size)
    : data_(data), size_(size) {
  next_byte();  // leading byte emitted by the encoder's cache priming
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= size_)
    throw data_error("range decoder: payload truncated");
  return data_[pos_++];
}

void RangeDecoder::normalize() {
  while (range_ < kTopValue) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
}

std::uint32_t RangeDecoder::decode_raw_bits(int nbits) {
  std::uint32_t value = 0;
  while (nbits > 0) {
    const int chunk = std::min(nbits, kCdfPrecision);
    const std::uint32_t r = range_ >> chunk;
    std::uint32_t v = code_ / r;
    if (v > (1u << chunk) - 1) v = (1u << chunk) - 1;
    code_ -= v * r;
    range_ = r;
    normalize();
    value = (value << chunk) | v;
    nbits -= chunk;
  }
  return value;
}

int RangeDecoder::decode_value(const QuantizedCdf& cdf) {
  const std::uint32_t r = range_ >> kCdfPrecision;
  std::uint32_t dcum = code_ / r;
  if (dcum > kCdfTotal - 1) dcum = kCdfTotal - 1;
  // cum is strictly increasing; find the bin containing dcum.
  const auto it =
      std::upper_bound(cdf.cum.begin(), cdf.cum.end(), dcum) - 1;
  const int idx = int(it - cdf.cum.begin());
  code_ -= cdf.cum[std::size_t(idx)] * r;
  range_ = cdf.freq[std::size_t(idx)] * r;
  normalize();
  if (idx != cdf.escape_index()) return cdf.value_of(idx);
  const std::uint32_t raw = decode_raw_bits(32);
  const std::int64_t mag = raw & (kSignBit - 1);
  return int((raw & kSignBit) ? -mag : mag);
}

}  // namespace dbcc
