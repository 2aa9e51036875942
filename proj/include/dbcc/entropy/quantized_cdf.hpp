#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace dbcc {

inline constexpr int kCdfPrecision = 16;
inline constexpr std::uint32_t kCdfTotal = 1u << kCdfPrecision;
inline constexpr int kMaxSupportRadius = 255;
inline constexpr double kLikelihoodFloor = 5.9604644775390625e-08;  // 2^-24

// Integer CDF table for one coding distribution. Symbols cover the
// integers [-radius, radius]; one trailing escape symbol backs the raw
// bypass path. Frequencies sum to exactly 2^16 and every bin is >= 1, so
// any integer is codable and decodable.
struct QuantizedCdf {
  int radius = 0;
  std::vector<std::uint16_t> freq;  // 2*radius + 2 entries, last is escape
  std::vector<std::uint32_t> cum;   // prefix sums, cum.back() == 2^16

  int symbol_count() const { return int(freq.size()); }
  int escape_index() const { return int(freq.size()) - 1; }
  bool in_support(int v) const { return v >= -radius && v <= radius; }
  int index_of(int v) const { return v + radius; }
  int value_of(int idx) const { return idx - radius; }

  // Deterministic serialization used by table-agreement checks.
  std::vector<std::uint8_t> bytes() const;
};

// Renormalizes a pmf over [-radius, radius] (plus escape mass) to a 16-bit
// integer table. Deterministic: identical inputs give identical bytes.
QuantizedCdf build_cdf(const std::vector<double>& pmf, double escape_mass);

// Zero-mean discretized Gaussian table for one scale-table entry.
// Support radius r = min(r_max, ceil(9*scale) + 2) keeps the modeled tail
// mass outside support below 2^-16 before renormalization.
QuantizedCdf gaussian_cdf_for_scale(int scale_idx);

// All 64 Gaussian tables, built once per process.
const std::vector<QuantizedCdf>& gaussian_cdf_set();

// Table for an arbitrary monotone CDF evaluator (the factorized prior):
// cdf_at(x) must be non-decreasing with limits 0 and 1. The support radius
// is grown until the un-modeled tail mass is below 2^-16 or r_max is hit.
QuantizedCdf cdf_from_distribution(const std::function<double(double)>& cdf_at);

// Scalar discretized-Gaussian likelihood used for rate estimation and by
// table construction: Phi((v-mu+0.5)/sigma) - Phi((v-mu-0.5)/sigma),
// floored at 2^-24.
double gaussian_bin_probability(double v, double mu, double sigma);

}  // namespace dbcc
