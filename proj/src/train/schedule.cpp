#include "dbcc/train/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "dbcc/codec/config.hpp"

namespace dbcc {

double lr_schedule(std::int64_t iter, double lr0, std::int64_t total_iters) {
  if (total_iters <= 0 || iter < 0) throw config_error("lr_schedule: bad args");
  const std::int64_t hold = total_iters / 2;
  if (iter < hold) return lr0;
  const std::int64_t step = std::max<std::int64_t>(1, total_iters / 15);
  const std::int64_t halvings = 1 + (iter - hold) / step;
  return lr0 * std::pow(0.5, double(halvings));
}

std::vector<double> lambda_presets(DistortionMetric metric) {
  if (metric == DistortionMetric::mse)
    return {0.0016, 0.0032, 0.0075, 0.015, 0.03, 0.045, 0.06};
  return {12.0, 40.0, 80.0, 120.0};
}

}  // namespace dbcc
