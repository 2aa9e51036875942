// Test-only MS-SSIM reference: direct (non-separable) 2D Gaussian
// filtering in plain double loops with the same reflect boundary and
// dyadic-average downsampling definition as the production metric, but
// sharing no code with it.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "dbcc/tensor/tensor.hpp"

namespace dbcc::testing {

struct RefPlane {
  int h = 0, w = 0;
  std::vector<double> v;
  double at(int i, int j) const { return v[std::size_t(i) * w + j]; }
};

inline int ref_reflect(int i, int n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  return i;
}

inline RefPlane ref_blur2d(const RefPlane& p) {
  constexpr int kW = 11, kH = kW / 2;
  static const auto kKernel = [] {
    std::array<double, kW * kW> k{};
    double sum = 0;
    for (int i = 0; i < kW; ++i)
      for (int j = 0; j < kW; ++j) {
        const double dy = i - kH, dx = j - kH;
        k[std::size_t(i) * kW + j] =
            std::exp(-(dx * dx + dy * dy) / (2 * 1.5 * 1.5));
        sum += k[std::size_t(i) * kW + j];
      }
    for (auto& x : k) x /= sum;
    return k;
  }();
  RefPlane out{p.h, p.w, std::vector<double>(p.v.size())};
  for (int i = 0; i < p.h; ++i)
    for (int j = 0; j < p.w; ++j) {
      double s = 0;
      for (int a = -kH; a <= kH; ++a)
        for (int b = -kH; b <= kH; ++b)
          s += kKernel[std::size_t(a + kH) * kW + (b + kH)] *
               p.at(ref_reflect(i + a, p.h), ref_reflect(j + b, p.w));
      out.v[std::size_t(i) * p.w + j] = s;
    }
  return out;
}

inline RefPlane ref_down2(const RefPlane& p) {
  RefPlane out{p.h / 2, p.w / 2, {}};
  out.v.resize(std::size_t(out.h) * out.w);
  for (int i = 0; i < out.h; ++i)
    for (int j = 0; j < out.w; ++j)
      out.v[std::size_t(i) * out.w + j] =
          0.25 * (p.at(2 * i, 2 * j) + p.at(2 * i, 2 * j + 1) +
                  p.at(2 * i + 1, 2 * j) + p.at(2 * i + 1, 2 * j + 1));
  return out;
}

inline double ref_ms_ssim(const Tensor<float>& a, const Tensor<float>& b) {
  constexpr double kWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const int ch = a.dim(0), h = a.dim(1), w = a.dim(2);
  const std::size_t plane = std::size_t(h) * w;
  double total = 0;
  for (int c = 0; c < ch; ++c) {
    RefPlane x{h, w, std::vector<double>(plane)};
    RefPlane y{h, w, std::vector<double>(plane)};
    for (std::size_t i = 0; i < plane; ++i) {
      x.v[i] = double(a.data()[std::size_t(c) * plane + i]);
      y.v[i] = double(b.data()[std::size_t(c) * plane + i]);
    }
    double value = 1.0;
    for (int s = 0; s < 5; ++s) {
      RefPlane xx = x, yy = y, xy = x;
      for (std::size_t i = 0; i < x.v.size(); ++i) {
        xx.v[i] = x.v[i] * x.v[i];
        yy.v[i] = y.v[i] * y.v[i];
        xy.v[i] = x.v[i] * y.v[i];
      }
      const RefPlane mx = ref_blur2d(x), my = ref_blur2d(y);
      const RefPlane mxx = ref_blur2d(xx), myy = ref_blur2d(yy),
                     mxy = ref_blur2d(xy);
      double cs_sum = 0, lcs_sum = 0;
      for (std::size_t i = 0; i < mx.v.size(); ++i) {
        const double sx = mxx.v[i] - mx.v[i] * mx.v[i];
        const double sy = myy.v[i] - my.v[i] * my.v[i];
        const double sxy = mxy.v[i] - mx.v[i] * my.v[i];
        const double cs = (2 * sxy + c2) / (sx + sy + c2);
        cs_sum += cs;
        lcs_sum += cs * (2 * mx.v[i] * my.v[i] + c1) /
                   (mx.v[i] * mx.v[i] + my.v[i] * my.v[i] + c1);
      }
      const double term = (s == 4 ? lcs_sum : cs_sum) / double(mx.v.size());
      value *= std::pow(std::max(term, 0.0), kWeights[s]);
      if (s < 4) {
        x = ref_down2(x);
        y = ref_down2(y);
      }
    }
    total += value;
  }
  return total / double(ch);
}

}  // namespace dbcc::testing
