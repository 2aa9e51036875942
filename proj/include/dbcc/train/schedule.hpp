#pragma once

#include <cstdint>

namespace dbcc {

// Learning-rate schedule: constant for the first half of training, then
// halved after every subsequent total/15 iterations. At the full scale of
// 1.5M iterations that is lr0 through 750k, then x0.5 per 100k.
double lr_schedule(std::int64_t iter, double lr0, std::int64_t total_iters);

}  // namespace dbcc
