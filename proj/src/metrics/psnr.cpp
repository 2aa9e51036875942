#include <cmath>

#include "dbcc/metrics/metrics.hpp"

namespace dbcc {

double psnr(const Tensor<float>& a, const Tensor<float>& b) {
  if (a.shape() != b.shape()) throw shape_error("psnr: shape mismatch");
  double mse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = double(a.data()[i]) - double(b.data()[i]);
    mse += d * d;
  }
  mse /= double(a.size());
  if (mse <= 0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

double msssim_db(double v) {
  if (v >= 1.0) return 100.0;
  return std::min(100.0, -10.0 * std::log10(1.0 - v));
}

}  // namespace dbcc
