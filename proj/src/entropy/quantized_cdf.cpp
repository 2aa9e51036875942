#include "dbcc/entropy/quantized_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dbcc/common.hpp"
#include "dbcc/entropy/scale_table.hpp"

namespace dbcc {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

}  // namespace

double gaussian_bin_probability(double v, double mu, double sigma) {
  const double hi = normal_cdf((v - mu + 0.5) / sigma);
  const double lo = normal_cdf((v - mu - 0.5) / sigma);
  return std::max(hi - lo, kLikelihoodFloor);
}

std::vector<std::uint8_t> QuantizedCdf::bytes() const {
  std::vector<std::uint8_t> out;
  out.reserve(4 + freq.size() * 2);
  out.push_back(std::uint8_t(radius & 0xFF));
  out.push_back(std::uint8_t((radius >> 8) & 0xFF));
  for (std::uint16_t f : freq) {
    out.push_back(std::uint8_t(f & 0xFF));
    out.push_back(std::uint8_t(f >> 8));
  }
  return out;
}

QuantizedCdf build_cdf(const std::vector<double>& pmf, double escape_mass) {
  if (pmf.empty() || pmf.size() % 2 == 0)
    throw config_error("build_cdf: pmf must cover [-r, r]");
  QuantizedCdf cdf;
  cdf.radius = int(pmf.size() / 2);
  const int k = int(pmf.size()) + 1;

  std::vector<double> mass(pmf);
  mass.push_back(std::max(escape_mass, 0.0));
  double total_mass = 0;
  for (double m : mass) total_mass += std::max(m, 0.0);
  if (total_mass <= 0) throw config_error("build_cdf: empty distribution");

  cdf.freq.resize(k);
  std::int64_t sum = 0;
  for (int i = 0; i < k; ++i) {
    const double p = std::max(mass[i], 0.0) / total_mass;
    std::int64_t f = std::int64_t(std::floor(p * kCdfTotal + 0.5));
    f = std::max<std::int64_t>(f, 1);
    cdf.freq[i] = std::uint16_t(std::min<std::int64_t>(f, kCdfTotal - 1));
    sum += cdf.freq[i];
  }
  // Deterministic fix-up: push the residual into the largest bins.
  std::int64_t diff = std::int64_t(kCdfTotal) - sum;
  while (diff != 0) {
    int best = 0;
    for (int i = 1; i < k; ++i)
      if (cdf.freq[i] > cdf.freq[best]) best = i;
    if (diff > 0) {
      cdf.freq[best] = std::uint16_t(cdf.freq[best] + diff);
      diff = 0;
    } else {
      const std::int64_t take =
          std::min<std::int64_t>(-diff, cdf.freq[best] - 1);
      if (take == 0) throw config_error("build_cdf: cannot renormalize");
      cdf.freq[best] = std::uint16_t(cdf.freq[best] - take);
      diff += take;
    }
  }

  cdf.cum.resize(k + 1);
  cdf.cum[0] = 0;
  for (int i = 0; i < k; ++i) cdf.cum[i + 1] = cdf.cum[i] + cdf.freq[i];
  return cdf;
}

QuantizedCdf gaussian_cdf_for_scale(int scale_idx) {
  const double s = scale_table()[std::size_t(scale_idx)];
  const int r =
      std::min(kMaxSupportRadius, int(std::ceil(s * 9.0)) + 2);
  std::vector<double> pmf(std::size_t(2 * r + 1));
  double covered = 0;
  for (int v = -r; v <= r; ++v) {
    const double p = gaussian_bin_probability(v, 0.0, s);
    pmf[std::size_t(v + r)] = p;
    covered += p;
  }
  return build_cdf(pmf, std::max(1.0 - covered, 0.0));
}

const std::vector<QuantizedCdf>& gaussian_cdf_set() {
  static const std::vector<QuantizedCdf> tables = [] {
    std::vector<QuantizedCdf> t;
    t.reserve(kScaleTableSize);
    for (int i = 0; i < kScaleTableSize; ++i)
      t.push_back(gaussian_cdf_for_scale(i));
    return t;
  }();
  return tables;
}

QuantizedCdf cdf_from_distribution(
    const std::function<double(double)>& cdf_at) {
  int r = 1;
  while (r < kMaxSupportRadius) {
    const double covered = cdf_at(r + 0.5) - cdf_at(-r - 0.5);
    if (covered >= 1.0 - 1.0 / double(kCdfTotal)) break;
    ++r;
  }
  std::vector<double> pmf(std::size_t(2 * r + 1));
  double covered = 0;
  for (int v = -r; v <= r; ++v) {
    const double p =
        std::max(cdf_at(v + 0.5) - cdf_at(v - 0.5), kLikelihoodFloor);
    pmf[std::size_t(v + r)] = p;
    covered += p;
  }
  return build_cdf(pmf, std::max(1.0 - covered, 0.0));
}

}  // namespace dbcc
