#include <algorithm>
#include <array>
#include <cmath>

#include "dbcc/metrics/metrics.hpp"

namespace dbcc {

namespace {

// Least-squares cubic fit of log10(bpp) as a function of quality. With
// exactly four points this interpolates them.
std::array<double, 4> fit_log_rate(const std::vector<RDPoint>& pts) {
  double xtx[4][4] = {};
  double xty[4] = {};
  for (const auto& p : pts) {
    if (!(p.bpp > 0)) throw config_error("bd_rate: bpp must be > 0");
    if (!std::isfinite(p.quality))
      throw config_error("bd_rate: quality must be finite");
    const double y = std::log10(p.bpp);
    double pow_i = 1.0;
    double powers[4];
    for (int i = 0; i < 4; ++i) {
      powers[i] = pow_i;
      pow_i *= p.quality;
    }
    for (int i = 0; i < 4; ++i) {
      xty[i] += powers[i] * y;
      for (int j = 0; j < 4; ++j) xtx[i][j] += powers[i] * powers[j];
    }
  }
  // Gaussian elimination with partial pivoting on the 4x4 normal system.
  std::array<double, 4> coef{};
  int perm[4] = {0, 1, 2, 3};
  for (int col = 0; col < 4; ++col) {
    int best = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(xtx[perm[r]][col]) > std::abs(xtx[perm[best]][col]))
        best = r;
    std::swap(perm[col], perm[best]);
    const double piv = xtx[perm[col]][col];
    if (std::abs(piv) < 1e-14)
      throw config_error("bd_rate: degenerate curve (repeated qualities?)");
    for (int r = col + 1; r < 4; ++r) {
      const double f = xtx[perm[r]][col] / piv;
      for (int c2 = col; c2 < 4; ++c2) xtx[perm[r]][c2] -= f * xtx[perm[col]][c2];
      xty[perm[r]] -= f * xty[perm[col]];
    }
  }
  for (int i = 3; i >= 0; --i) {
    double s = xty[perm[i]];
    for (int j = i + 1; j < 4; ++j) s -= xtx[perm[i]][j] * coef[std::size_t(j)];
    coef[std::size_t(i)] = s / xtx[perm[i]][i];
  }
  return coef;
}

double integrate_cubic(const std::array<double, 4>& c, double lo, double hi) {
  auto antideriv = [&](double x) {
    return c[0] * x + c[1] * x * x / 2 + c[2] * x * x * x / 3 +
           c[3] * x * x * x * x / 4;
  };
  return antideriv(hi) - antideriv(lo);
}

std::pair<double, double> quality_range(const std::vector<RDPoint>& pts) {
  double lo = pts[0].quality, hi = pts[0].quality;
  for (const auto& p : pts) {
    lo = std::min(lo, p.quality);
    hi = std::max(hi, p.quality);
  }
  return {lo, hi};
}

}  // namespace

double bd_rate(const std::vector<RDPoint>& anchor,
               const std::vector<RDPoint>& test) {
  if (anchor.size() < 4 || test.size() < 4)
    throw config_error("bd_rate: need at least 4 points per curve");
  const auto [alo, ahi] = quality_range(anchor);
  const auto [tlo, thi] = quality_range(test);
  const double lo = std::max(alo, tlo);
  const double hi = std::min(ahi, thi);
  if (!(hi > lo))
    throw data_error("bd_rate: quality ranges do not overlap");

  const auto ca = fit_log_rate(anchor);
  const auto ct = fit_log_rate(test);
  const double avg_diff =
      (integrate_cubic(ct, lo, hi) - integrate_cubic(ca, lo, hi)) / (hi - lo);
  return 100.0 * (std::pow(10.0, avg_diff) - 1.0);
}

}  // namespace dbcc
