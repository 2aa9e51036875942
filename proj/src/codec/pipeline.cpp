#include "dbcc/codec/pipeline.hpp"

#include <cmath>

#include "dbcc/coder/range_coder.hpp"
#include "dbcc/entropy/quantize.hpp"

namespace dbcc {

namespace {

constexpr double kInvLn2 = 1.4426950408889634074;

// Exact cost in bits of coding v against the table: the coder spends
// -log2(freq/2^16), plus 32 raw bits behind the escape symbol when v is
// out of support. Summing this tracks the payload to within the coder's
// renormalization overhead.
double table_bits(const QuantizedCdf& cdf, int v) {
  const int idx = cdf.in_support(v) ? cdf.index_of(v) : cdf.escape_index();
  double bits =
      -std::log(double(cdf.freq[std::size_t(idx)]) / kCdfTotal) * kInvLn2;
  if (!cdf.in_support(v)) bits += 32.0;
  return bits;
}

// Codes one y-slice against its Gaussian parameters. Scales are snapped
// up to the shared 64-entry table before any coding decision, and the
// rate estimate uses the same quantized table as the coder.
Tensor<float> encode_slice(RangeEncoder& enc, const Tensor<float>& yslice,
                           const GaussianParams<float>& p, double& bits) {
  const auto& tables = gaussian_cdf_set();
  Tensor<float> out(yslice.shape());
  for (std::size_t i = 0; i < yslice.size(); ++i) {
    const float mu = p.mu.data()[i];
    const int si = scale_index(double(p.sigma.data()[i]));
    const int v = int(std::nearbyint(double(yslice.data()[i] - mu)));
    enc.encode_value(tables[std::size_t(si)], v);
    bits += table_bits(tables[std::size_t(si)], v);
    out.data()[i] = float(v) + mu;
  }
  return out;
}

Tensor<float> decode_slice(RangeDecoder& dec, const Shape& shape,
                           const GaussianParams<float>& p) {
  const auto& tables = gaussian_cdf_set();
  Tensor<float> out(shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int si = scale_index(double(p.sigma.data()[i]));
    const int v = dec.decode_value(tables[std::size_t(si)]);
    out.data()[i] = float(v) + p.mu.data()[i];
  }
  return out;
}

Tensor<float> encode_hyper(RangeEncoder& enc, const Tensor<float>& z,
                           const std::vector<QuantizedCdf>& ztabs,
                           double& bits) {
  Tensor<float> zhat(z.shape());
  const std::size_t plane = std::size_t(z.dim(1)) * z.dim(2);
  for (int ch = 0; ch < z.dim(0); ++ch)
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t idx = std::size_t(ch) * plane + i;
      const int v = int(std::nearbyint(double(z.data()[idx])));
      enc.encode_value(ztabs[std::size_t(ch)], v);
      bits += table_bits(ztabs[std::size_t(ch)], v);
      zhat.data()[idx] = float(v);
    }
  return zhat;
}

// Shared by compress_latents and compress_stage1_bytes: codes z and the
// y1 slices, filling in the bundle as it goes.
void encode_through_stage1(RangeEncoder& enc, const Model<float>& model,
                           const Tensor<float>& padded, LatentBundle& lat,
                           Tensor<float>& fz,
                           std::vector<Tensor<float>>& y1_slices,
                           double& bits) {
  auto [y1, y2] = model.encode_branches(padded);
  lat.y1 = y1;
  lat.y2 = y2;
  lat.z = model.hyper_encode(y1, y2);

  const auto ztabs = prior_cdf_tables(model);
  lat.z_hat = encode_hyper(enc, lat.z, ztabs, bits);
  fz = model.hyper_decode(lat.z_hat);

  const SliceLayout layout = slice_partition(model.cfg.M, model.cfg.G);
  for (int k = 0; k < layout.G; ++k) {
    auto params = model.charm_stage1_params(fz, y1_slices, k);
    auto yslice = slice_channels(lat.y1, layout.begin(k), layout.end(k));
    y1_slices.push_back(encode_slice(enc, yslice, params, bits));
  }
  lat.y1_hat = concat_channels(y1_slices);
}

}  // namespace

std::vector<QuantizedCdf> prior_cdf_tables(const Model<float>& model) {
  std::vector<QuantizedCdf> tabs;
  tabs.reserve(std::size_t(model.prior.channels));
  for (int ch = 0; ch < model.prior.channels; ++ch)
    tabs.push_back(cdf_from_distribution(
        [&model, ch](double x) { return model.prior.cdf_value(ch, x); }));
  return tabs;
}

CompressResult compress_latents(const Model<float>& model,
                                const Tensor<float>& padded) {
  NoGradGuard ng;
  CompressResult res;
  RangeEncoder enc;
  Tensor<float> fz;
  std::vector<Tensor<float>> y1_slices;
  encode_through_stage1(enc, model, padded, res.latents, fz, y1_slices,
                        res.estimated_bits);

  if (model.cfg.use_tb) {
    const SliceLayout layout = slice_partition(model.cfg.M, model.cfg.G);
    std::vector<Tensor<float>> y2_slices;
    for (int k = 0; k < layout.G; ++k) {
      auto params = model.charm_stage2_params(fz, res.latents.y1_hat,
                                              y2_slices, k);
      auto yslice =
          slice_channels(res.latents.y2, layout.begin(k), layout.end(k));
      y2_slices.push_back(encode_slice(enc, yslice, params,
                                       res.estimated_bits));
    }
    res.latents.y2_hat = concat_channels(y2_slices);
  }

  res.payload = enc.finish();
  return res;
}

std::vector<std::uint8_t> compress_stage1_bytes(const Model<float>& model,
                                                const Tensor<float>& padded) {
  NoGradGuard ng;
  RangeEncoder enc;
  LatentBundle lat;
  Tensor<float> fz;
  std::vector<Tensor<float>> y1_slices;
  double bits = 0;
  encode_through_stage1(enc, model, padded, lat, fz, y1_slices, bits);
  return enc.finish();
}

DecompressResult decompress_latents(const Model<float>& model,
                                    const std::vector<std::uint8_t>& payload,
                                    int padded_h, int padded_w, int orig_h,
                                    int orig_w) {
  NoGradGuard ng;
  if (padded_h % 64 != 0 || padded_w % 64 != 0)
    throw shape_error("decompress: padded dims must be multiples of 64");
  DecompressResult res;
  RangeDecoder dec(payload.data(), payload.size());

  const int zh = padded_h / 64, zw = padded_w / 64;
  const auto ztabs = prior_cdf_tables(model);
  Tensor<float> zhat(Shape{model.cfg.hyper_channels, zh, zw});
  const std::size_t plane = std::size_t(zh) * zw;
  for (int ch = 0; ch < model.cfg.hyper_channels; ++ch)
    for (std::size_t i = 0; i < plane; ++i)
      zhat.data()[std::size_t(ch) * plane + i] =
          float(dec.decode_value(ztabs[std::size_t(ch)]));
  res.latents.z_hat = zhat;

  auto fz = model.hyper_decode(zhat);
  const SliceLayout layout = slice_partition(model.cfg.M, model.cfg.G);
  const Shape slice_shape{layout.channels_per_slice, padded_h / 16,
                          padded_w / 16};

  std::vector<Tensor<float>> y1_slices;
  for (int k = 0; k < layout.G; ++k) {
    auto params = model.charm_stage1_params(fz, y1_slices, k);
    y1_slices.push_back(decode_slice(dec, slice_shape, params));
  }
  res.latents.y1_hat = concat_channels(y1_slices);

  if (model.cfg.use_tb) {
    std::vector<Tensor<float>> y2_slices;
    for (int k = 0; k < layout.G; ++k) {
      auto params =
          model.charm_stage2_params(fz, res.latents.y1_hat, y2_slices, k);
      y2_slices.push_back(decode_slice(dec, slice_shape, params));
    }
    res.latents.y2_hat = concat_channels(y2_slices);
  }

  auto padded =
      model.decode_image(res.latents.y1_hat, res.latents.y2_hat);
  res.image = crop_after_decode(padded, orig_h, orig_w);
  return res;
}

void check_header_matches(const BitstreamHeader& h, const ModelConfig& cfg) {
  const auto mismatch = [](const char* field) {
    throw config_error(std::string("bitstream/model mismatch: ") + field);
  };
  if (int(h.latent_channels) != cfg.M) mismatch("latent channels (M)");
  if (int(h.groups) != cfg.G) mismatch("slice groups (G)");
  if (int(h.filters) != cfg.N) mismatch("filters (N)");
  if (int(h.hyper_channels) != cfg.hyper_channels) mismatch("hyper channels");
  if (DistortionMetric(h.metric) != cfg.metric) mismatch("metric");
  const auto presets = lambda_presets(cfg.metric);
  std::uint8_t model_idx = BitstreamHeader::kCustomLambda;
  for (std::size_t i = 0; i < presets.size(); ++i)
    if (std::abs(presets[i] - cfg.lambda) < 1e-12)
      model_idx = std::uint8_t(i);
  if (h.lambda_index != model_idx) mismatch("lambda index");
}

EncodedFile encode_image(const Model<float>& model,
                         const Tensor<float>& image) {
  if (image.ndim() != 3 || image.dim(0) != 3)
    throw shape_error("encode_image: expects a 3xHxW image tensor");
  EncodedFile out;
  auto padded = pad_to_multiple(image, 64);
  out.detail = compress_latents(model, padded);

  BitstreamHeader& h = out.header;
  h.metric = std::uint8_t(model.cfg.metric);
  h.groups = std::uint8_t(model.cfg.G);
  h.latent_channels = std::uint16_t(model.cfg.M);
  h.filters = std::uint16_t(model.cfg.N);
  h.hyper_channels = std::uint16_t(model.cfg.hyper_channels);
  h.orig_width = std::uint32_t(image.dim(2));
  h.orig_height = std::uint32_t(image.dim(1));
  h.payload_len = out.detail.payload.size();
  const auto presets = lambda_presets(model.cfg.metric);
  for (std::size_t i = 0; i < presets.size(); ++i)
    if (std::abs(presets[i] - model.cfg.lambda) < 1e-12)
      h.lambda_index = std::uint8_t(i);

  out.bytes = pack(h, out.detail.payload);
  return out;
}

Tensor<float> decode_file(const Model<float>& model, const std::uint8_t* data,
                          std::size_t size) {
  auto [h, payload] = unpack(data, size);
  check_header_matches(h, model.cfg);
  const int orig_h = int(h.orig_height), orig_w = int(h.orig_width);
  const int ph = (orig_h + 63) / 64 * 64;
  const int pw = (orig_w + 63) / 64 * 64;
  return decompress_latents(model, payload, ph, pw, orig_h, orig_w).image;
}

}  // namespace dbcc
