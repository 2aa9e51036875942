#include "dbcc/entropy/scale_table.hpp"

#include <algorithm>
#include <cmath>

namespace dbcc {

const std::array<double, kScaleTableSize>& scale_table() {
  static const std::array<double, kScaleTableSize> table = [] {
    std::array<double, kScaleTableSize> t{};
    const double lo = std::log(kSigmaMin);
    const double hi = std::log(kSigmaMax);
    for (int i = 0; i < kScaleTableSize; ++i)
      t[i] = std::exp(lo + (hi - lo) * double(i) / (kScaleTableSize - 1));
    t.front() = kSigmaMin;
    t.back() = kSigmaMax;
    return t;
  }();
  return table;
}

int scale_index(double sigma) {
  const auto& t = scale_table();
  auto it = std::lower_bound(t.begin(), t.end(), sigma);
  if (it == t.end()) return kScaleTableSize - 1;
  return int(it - t.begin());
}

}  // namespace dbcc
