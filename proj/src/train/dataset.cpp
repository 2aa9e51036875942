#include "dbcc/train/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "dbcc/common.hpp"
#include "dbcc/io/image.hpp"

namespace dbcc {

namespace {

// Bilinear resize of a CHW tensor to (oh, ow).
Tensor<float> resize_bilinear(const Tensor<float>& src, int oh, int ow) {
  const int c = src.dim(0), h = src.dim(1), w = src.dim(2);
  Tensor<float> out(Shape{c, oh, ow});
  const double sy = double(h) / oh;
  const double sx = double(w) / ow;
  for (int ch = 0; ch < c; ++ch) {
    const float* sp = src.data() + std::size_t(ch) * h * w;
    float* dp = out.data() + std::size_t(ch) * oh * ow;
    for (int i = 0; i < oh; ++i) {
      const double fy = (i + 0.5) * sy - 0.5;
      const int y0 = std::clamp(int(std::floor(fy)), 0, h - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double wy = std::clamp(fy - y0, 0.0, 1.0);
      for (int j = 0; j < ow; ++j) {
        const double fx = (j + 0.5) * sx - 0.5;
        const int x0 = std::clamp(int(std::floor(fx)), 0, w - 1);
        const int x1 = std::min(x0 + 1, w - 1);
        const double wx = std::clamp(fx - x0, 0.0, 1.0);
        const double top = (1 - wx) * sp[std::size_t(y0) * w + x0] +
                           wx * sp[std::size_t(y0) * w + x1];
        const double bot = (1 - wx) * sp[std::size_t(y1) * w + x0] +
                           wx * sp[std::size_t(y1) * w + x1];
        dp[std::size_t(i) * ow + j] = float((1 - wy) * top + wy * bot);
      }
    }
  }
  return out;
}

Tensor<float> crop(const Tensor<float>& src, int top, int left, int size) {
  const int c = src.dim(0), h = src.dim(1), w = src.dim(2);
  Tensor<float> out(Shape{c, size, size});
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < size; ++i)
      std::copy_n(src.data() + (std::size_t(ch) * h + top + i) * w + left,
                  size,
                  out.data() + (std::size_t(ch) * size + i) * size);
  return out;
}

Tensor<float> rotate90(const Tensor<float>& src, int quarter_turns) {
  const int c = src.dim(0), n = src.dim(1);
  if (quarter_turns % 4 == 0) return src;
  Tensor<float> out(src.shape());
  for (int ch = 0; ch < c; ++ch) {
    const float* sp = src.data() + std::size_t(ch) * n * n;
    float* dp = out.data() + std::size_t(ch) * n * n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        int si = i, sj = j;
        switch (quarter_turns % 4) {
          case 1: si = n - 1 - j; sj = i; break;
          case 2: si = n - 1 - i; sj = n - 1 - j; break;
          case 3: si = j; sj = n - 1 - i; break;
        }
        dp[std::size_t(i) * n + j] = sp[std::size_t(si) * n + sj];
      }
  }
  return out;
}

Tensor<float> hflip(const Tensor<float>& src) {
  const int c = src.dim(0), h = src.dim(1), w = src.dim(2);
  Tensor<float> out(src.shape());
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j)
        out.data()[(std::size_t(ch) * h + i) * w + j] =
            src.data()[(std::size_t(ch) * h + i) * w + (w - 1 - j)];
  return out;
}

}  // namespace

PatchDataset make_patches(const std::string& image_dir, int patch, int count,
                          std::uint64_t seed, bool augment) {
  if (patch <= 0 || count <= 0)
    throw config_error("make_patches: patch and count must be positive");

  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(image_dir))
    if (entry.is_regular_file()) paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());

  std::vector<Tensor<float>> images;
  for (const auto& p : paths) {
    try {
      auto img = load_image(p.string());
      if (std::min(img.dim(1), img.dim(2)) < patch) {
        std::fprintf(stderr, "warning: %s smaller than patch size, skipped\n",
                     p.string().c_str());
        continue;
      }
      images.push_back(std::move(img));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "warning: skipping %s: %s\n", p.string().c_str(),
                   e.what());
    }
  }
  if (images.empty())
    throw data_error("make_patches: no usable images in " + image_dir);

  PatchDataset ds;
  ds.patches.reserve(std::size_t(count));
  for (int i = 0; i < count; ++i) {
    std::mt19937_64 rng(mix_seed(seed, std::uint64_t(i)));
    const auto& img =
        images[std::uniform_int_distribution<std::size_t>(
            0, images.size() - 1)(rng)];
    const int h = img.dim(1), w = img.dim(2);

    int side = patch;
    if (augment) {
      // Scale jitter: crop a side/scale region and resize it to `patch`.
      const double scale =
          std::uniform_real_distribution<double>(0.75, 1.25)(rng);
      side = std::clamp(int(std::lround(patch / scale)), patch / 2,
                        std::min(h, w));
      side = std::max(side, 2);
    }
    const int top = side < h ? std::uniform_int_distribution<int>(
                                   0, h - side)(rng)
                             : 0;
    const int left = side < w ? std::uniform_int_distribution<int>(
                                    0, w - side)(rng)
                              : 0;
    Tensor<float> tile = crop(img, top, left, side);
    if (side != patch) tile = resize_bilinear(tile, patch, patch);
    if (augment) {
      const int turns = std::uniform_int_distribution<int>(0, 3)(rng);
      tile = rotate90(tile, turns);
      if (std::uniform_int_distribution<int>(0, 1)(rng)) tile = hflip(tile);
    }
    ds.patches.push_back(std::move(tile));
  }
  return ds;
}

}  // namespace dbcc
