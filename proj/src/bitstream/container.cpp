#include "dbcc/bitstream/container.hpp"

#include <cstring>

#include "dbcc/common.hpp"

namespace dbcc {

namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(std::uint8_t((std::uint64_t(v) >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= std::uint64_t(p[i]) << (8 * i);
  return T(v);
}

}  // namespace

std::vector<std::uint8_t> pack(const BitstreamHeader& h,
                               const std::vector<std::uint8_t>& payload) {
  if (h.orig_width == 0 || h.orig_height == 0)
    throw format_error("pack: original dimensions must be >= 1");
  std::vector<std::uint8_t> out;
  out.reserve(BitstreamHeader::kSize + payload.size());
  out.insert(out.end(), std::begin(BitstreamHeader::kMagic),
             std::end(BitstreamHeader::kMagic));
  out.push_back(h.version);
  out.push_back(h.metric);
  out.push_back(h.lambda_index);
  out.push_back(h.groups);
  put_le(out, h.latent_channels);
  put_le(out, h.filters);
  put_le(out, h.hyper_channels);
  put_le(out, h.orig_width);
  put_le(out, h.orig_height);
  put_le(out, std::uint64_t(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::pair<BitstreamHeader, std::vector<std::uint8_t>> unpack(
    const std::uint8_t* data, std::size_t size) {
  if (size < BitstreamHeader::kSize)
    throw format_error("bitstream: shorter than header");
  if (std::memcmp(data, BitstreamHeader::kMagic, 4) != 0)
    throw format_error("bitstream: bad magic, not a .dbcc file");
  BitstreamHeader h;
  h.version = data[4];
  if (h.version != BitstreamHeader::kVersion)
    throw format_error("bitstream: unsupported version " +
                       std::to_string(int(h.version)));
  h.metric = data[5];
  h.lambda_index = data[6];
  h.groups = data[7];
  h.latent_channels = get_le<std::uint16_t>(data + 8);
  h.filters = get_le<std::uint16_t>(data + 10);
  h.hyper_channels = get_le<std::uint16_t>(data + 12);
  h.orig_width = get_le<std::uint32_t>(data + 14);
  h.orig_height = get_le<std::uint32_t>(data + 18);
  h.payload_len = get_le<std::uint64_t>(data + 22);
  if (h.orig_width == 0 || h.orig_height == 0)
    throw format_error("bitstream: zero image dimensions");
  if (h.payload_len != size - BitstreamHeader::kSize)
    throw format_error("bitstream: payload length mismatch");
  return {h, std::vector<std::uint8_t>(data + BitstreamHeader::kSize,
                                       data + size)};
}

Tensor<float> pad_to_multiple(const Tensor<float>& x, int m) {
  if (x.ndim() != 3) throw shape_error("pad_to_multiple: expects CHW");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int ph = (h + m - 1) / m * m;
  const int pw = (w + m - 1) / m * m;
  if (ph == h && pw == w) return x;
  Tensor<float> out(Shape{c, ph, pw});
  for (int ch = 0; ch < c; ++ch) {
    const float* src = x.data() + std::size_t(ch) * h * w;
    float* dst = out.data() + std::size_t(ch) * ph * pw;
    for (int i = 0; i < ph; ++i) {
      // reflect without repeating the edge sample
      int si = i < h ? i : 2 * h - 2 - i;
      si = std::max(0, std::min(si, h - 1));
      for (int j = 0; j < pw; ++j) {
        int sj = j < w ? j : 2 * w - 2 - j;
        sj = std::max(0, std::min(sj, w - 1));
        dst[std::size_t(i) * pw + j] = src[std::size_t(si) * w + sj];
      }
    }
  }
  return out;
}

Tensor<float> crop_after_decode(const Tensor<float>& x, int orig_h,
                                int orig_w) {
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (orig_h > h || orig_w > w)
    throw shape_error("crop_after_decode: crop larger than input");
  if (orig_h == h && orig_w == w) return x;
  Tensor<float> out(Shape{c, orig_h, orig_w});
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < orig_h; ++i)
      std::memcpy(out.data() + (std::size_t(ch) * orig_h + i) * orig_w,
                  x.data() + (std::size_t(ch) * h + i) * w,
                  std::size_t(orig_w) * sizeof(float));
  return out;
}

}  // namespace dbcc
