#pragma once

#include <array>

namespace dbcc {

inline constexpr double kSigmaMin = 0.11;
inline constexpr double kSigmaMax = 256.0;
inline constexpr int kScaleTableSize = 64;

// 64 log-spaced scales over [0.11, 256], endpoints exact. Shared by the
// encoder and decoder; sigma values are snapped to the smallest table
// entry >= sigma before any coding decision.
const std::array<double, kScaleTableSize>& scale_table();

int scale_index(double sigma);

}  // namespace dbcc
