#include <array>
#include <cmath>
#include <vector>

#include "dbcc/metrics/metrics.hpp"

namespace dbcc {

namespace {

constexpr int kWindow = 11;
constexpr int kHalf = kWindow / 2;
constexpr double kSigma = 1.5;
constexpr int kScales = 5;
constexpr std::array<double, kScales> kWeights = {0.0448, 0.2856, 0.3001,
                                                  0.2363, 0.1333};
constexpr double kC1 = 0.01 * 0.01;  // (K1*L)^2, L = 1
constexpr double kC2 = 0.03 * 0.03;

struct Plane {
  int h = 0, w = 0;
  std::vector<double> v;
  double& at(int i, int j) { return v[std::size_t(i) * w + j]; }
  double at(int i, int j) const { return v[std::size_t(i) * w + j]; }
};

const std::array<double, kWindow>& gauss_taps() {
  static const std::array<double, kWindow> taps = [] {
    std::array<double, kWindow> t{};
    double sum = 0;
    for (int i = 0; i < kWindow; ++i) {
      const double x = i - kHalf;
      t[std::size_t(i)] = std::exp(-x * x / (2 * kSigma * kSigma));
      sum += t[std::size_t(i)];
    }
    for (auto& x : t) x /= sum;
    return t;
  }();
  return taps;
}

int reflect(int i, int n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  return i;
}

// Separable Gaussian blur with reflect boundary handling; same-size output.
Plane blur(const Plane& p) {
  const auto& t = gauss_taps();
  Plane tmp{p.h, p.w, std::vector<double>(p.v.size())};
  for (int i = 0; i < p.h; ++i)
    for (int j = 0; j < p.w; ++j) {
      double s = 0;
      for (int k = -kHalf; k <= kHalf; ++k)
        s += t[std::size_t(k + kHalf)] * p.at(i, reflect(j + k, p.w));
      tmp.at(i, j) = s;
    }
  Plane out{p.h, p.w, std::vector<double>(p.v.size())};
  for (int i = 0; i < p.h; ++i)
    for (int j = 0; j < p.w; ++j) {
      double s = 0;
      for (int k = -kHalf; k <= kHalf; ++k)
        s += t[std::size_t(k + kHalf)] * tmp.at(reflect(i + k, p.h), j);
      out.at(i, j) = s;
    }
  return out;
}

Plane downsample2(const Plane& p) {
  Plane out{p.h / 2, p.w / 2, {}};
  out.v.resize(std::size_t(out.h) * out.w);
  for (int i = 0; i < out.h; ++i)
    for (int j = 0; j < out.w; ++j)
      out.at(i, j) = 0.25 * (p.at(2 * i, 2 * j) + p.at(2 * i, 2 * j + 1) +
                             p.at(2 * i + 1, 2 * j) +
                             p.at(2 * i + 1, 2 * j + 1));
  return out;
}

Plane mul_planes(const Plane& a, const Plane& b) {
  Plane out = a;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= b.v[i];
  return out;
}

// Mean contrast-structure term, and luminance*cs at the coarsest scale.
void ssim_terms(const Plane& x, const Plane& y, double& mean_cs,
                double& mean_lcs) {
  const Plane mx = blur(x), my = blur(y);
  const Plane mxx = blur(mul_planes(x, x));
  const Plane myy = blur(mul_planes(y, y));
  const Plane mxy = blur(mul_planes(x, y));
  double cs_sum = 0, lcs_sum = 0;
  for (std::size_t i = 0; i < mx.v.size(); ++i) {
    const double mux = mx.v[i], muy = my.v[i];
    const double sx = mxx.v[i] - mux * mux;
    const double sy = myy.v[i] - muy * muy;
    const double sxy = mxy.v[i] - mux * muy;
    const double cs = (2 * sxy + kC2) / (sx + sy + kC2);
    const double l = (2 * mux * muy + kC1) / (mux * mux + muy * muy + kC1);
    cs_sum += cs;
    lcs_sum += l * cs;
  }
  mean_cs = cs_sum / double(mx.v.size());
  mean_lcs = lcs_sum / double(mx.v.size());
}

}  // namespace

double ms_ssim(const Tensor<float>& a, const Tensor<float>& b) {
  if (a.shape() != b.shape()) throw shape_error("ms_ssim: shape mismatch");
  if (a.ndim() != 3) throw shape_error("ms_ssim: expects CHW");
  const int c = a.dim(0), h = a.dim(1), w = a.dim(2);
  if (std::min(h, w) < 160)
    throw config_error(
        "ms_ssim: 5 dyadic scales need min(H, W) >= 160, got " +
        std::to_string(std::min(h, w)));

  double total = 0;
  const std::size_t plane = std::size_t(h) * w;
  for (int ch = 0; ch < c; ++ch) {
    Plane x{h, w, std::vector<double>(plane)};
    Plane y{h, w, std::vector<double>(plane)};
    for (std::size_t i = 0; i < plane; ++i) {
      x.v[i] = double(a.data()[std::size_t(ch) * plane + i]);
      y.v[i] = double(b.data()[std::size_t(ch) * plane + i]);
    }
    double value = 1.0;
    for (int s = 0; s < kScales; ++s) {
      double cs, lcs;
      ssim_terms(x, y, cs, lcs);
      const double term = s + 1 == kScales ? lcs : cs;
      value *= std::pow(std::max(term, 0.0), kWeights[std::size_t(s)]);
      if (s + 1 < kScales) {
        x = downsample2(x);
        y = downsample2(y);
      }
    }
    total += value;
  }
  return total / double(c);
}

}  // namespace dbcc
