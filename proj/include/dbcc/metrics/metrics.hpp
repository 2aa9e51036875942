#pragma once

#include <vector>

#include "dbcc/tensor/tensor.hpp"

namespace dbcc {

// One point on a rate-distortion curve. `quality` is PSNR in dB or
// MS-SSIM in dB depending on the curve being compared.
struct RDPoint {
  double bpp = 0;
  double quality = 0;
};

// 10*log10(1/MSE) on [0,1]-scaled images, capped at 100 dB for identical
// inputs.
double psnr(const Tensor<float>& a, const Tensor<float>& b);

// 5-scale MS-SSIM, 11x11 Gaussian window sigma 1.5, standard weights,
// K1=0.01, K2=0.03, computed per channel and averaged. Requires
// min(H, W) >= 160.
double ms_ssim(const Tensor<float>& a, const Tensor<float>& b);

// -10*log10(1 - v); v == 1 capped at 100 dB.
double msssim_db(double v);

// Bjontegaard delta-rate of `test` against `anchor` in percent: cubic fit
// of log10(bpp) against quality, rate difference integrated over the
// common quality interval. Needs >= 4 points per curve and overlapping
// quality ranges.
double bd_rate(const std::vector<RDPoint>& anchor,
               const std::vector<RDPoint>& test);

}  // namespace dbcc
