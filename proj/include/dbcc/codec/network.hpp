#pragma once

#include "dbcc/codec/config.hpp"
#include "dbcc/entropy/charm.hpp"
#include "dbcc/entropy/factorized_prior.hpp"
#include "dbcc/nn/blocks.hpp"

namespace dbcc {

// One analysis branch. Canonical layout (four stages of pooling, three
// residual groups, two attention modules):
//   down, RG, down, RG, Attn, down, RG, down, Attn, conv->M
// `kernel` selects the downsampling conv size (3x3 vs 1x1 branch).
template <typename T>
struct EncoderBranch {
  Downsample<T> d1, d2, d3, d4;
  ResidualGroup<T> rg1, rg2, rg3;
  AttentionBlock<T> attn1, attn2;
  Conv2dLayer<T> to_latent;

  EncoderBranch() = default;
  EncoderBranch(ParamStore<T>& ps, const std::string& prefix, int n, int m,
                int kernel, std::mt19937_64& rng)
      : d1(ps, prefix + ".down1", 3, n, kernel, rng),
        d2(ps, prefix + ".down2", n, n, kernel, rng),
        d3(ps, prefix + ".down3", n, n, kernel, rng),
        d4(ps, prefix + ".down4", n, n, kernel, rng),
        rg1(ps, prefix + ".rg1", n, rng),
        rg2(ps, prefix + ".rg2", n, rng),
        rg3(ps, prefix + ".rg3", n, rng),
        attn1(ps, prefix + ".attn1", n, rng),
        attn2(ps, prefix + ".attn2", n, rng),
        to_latent(ps, prefix + ".to_latent", n, m, 3, 1, rng) {}

  Tensor<T> operator()(const Tensor<T>& x) const {
    auto h = d1(x);
    h = rg1(h);
    h = d2(h);
    h = rg2(h);
    h = attn1(h);
    h = d3(h);
    h = rg3(h);
    h = d4(h);
    h = attn2(h);
    return to_latent(h);  // no activation on the latent-producing conv
  }
};

// Synthesis network mirroring the encoder with deconvolutions.
template <typename T>
struct DecoderNet {
  Conv2dLayer<T> from_latent;
  AttentionBlock<T> attn1, attn2;
  ResidualGroup<T> rg1, rg2, rg3;
  Upsample<T> u1, u2, u3, u4;

  DecoderNet() = default;
  DecoderNet(ParamStore<T>& ps, const std::string& prefix, int n,
             int latent_in, std::mt19937_64& rng)
      : from_latent(ps, prefix + ".from_latent", latent_in, n, 3, 1, rng),
        attn1(ps, prefix + ".attn1", n, rng),
        attn2(ps, prefix + ".attn2", n, rng),
        rg1(ps, prefix + ".rg1", n, rng),
        rg2(ps, prefix + ".rg2", n, rng),
        rg3(ps, prefix + ".rg3", n, rng),
        u1(ps, prefix + ".up1", n, n, rng),
        u2(ps, prefix + ".up2", n, n, rng),
        u3(ps, prefix + ".up3", n, n, rng),
        u4(ps, prefix + ".up4", n, 3, rng, /*activate=*/false) {
    // Small final-layer init keeps the initial reconstruction near zero
    // instead of amplifying whatever scale the latents start at.
    for (auto& v : u4.deconv.w.values()) v *= T(0.1);
  }

  Tensor<T> operator()(const Tensor<T>& yhat) const {
    auto h = from_latent(yhat);
    h = attn1(h);
    h = u1(h);
    h = rg1(h);
    h = u2(h);
    h = attn2(h);
    h = rg2(h);
    h = u3(h);
    h = rg3(h);
    return u4(h);  // unclamped; callers clamp for display
  }
};

template <typename T>
struct HyperEncoder {
  Conv2dLayer<T> c1, c2;

  HyperEncoder() = default;
  HyperEncoder(ParamStore<T>& ps, const std::string& prefix, int cin,
               int hyper, std::mt19937_64& rng)
      : c1(ps, prefix + ".c1", cin, hyper, 3, 2, rng),
        c2(ps, prefix + ".c2", hyper, hyper, 3, 2, rng) {}

  Tensor<T> operator()(const Tensor<T>& y) const {
    // final layer operates without any activation function
    return c2(leaky_relu(c1(y), T(kLeakySlope)));
  }
};

template <typename T>
struct HyperDecoder {
  Deconv2dLayer<T> d1, d2;

  HyperDecoder() = default;
  HyperDecoder(ParamStore<T>& ps, const std::string& prefix, int hyper,
               int cout, std::mt19937_64& rng)
      : d1(ps, prefix + ".d1", hyper, hyper, 3, 2, rng),
        d2(ps, prefix + ".d2", hyper, cout, 3, 2, rng) {}

  Tensor<T> operator()(const Tensor<T>& zhat) const {
    return d2(leaky_relu(d1(zhat), T(kLeakySlope)));
  }
};

// The full model: dual-branch encoders, hyper pair, decoder, factorized
// prior and the two ChARM stages (one per-slice network each).
template <typename T>
struct Model {
  ModelConfig cfg;
  ParamStore<T> params;
  EncoderBranch<T> ga1, ga2;
  HyperEncoder<T> ha;
  HyperDecoder<T> hs;
  DecoderNet<T> gs;
  FactorizedPrior<T> prior;
  std::vector<CharmNet<T>> stage1, stage2;

  explicit Model(ModelConfig config, std::uint64_t seed = 0)
      : cfg(config) {
    cfg.validate();
    std::mt19937_64 rng(mix_seed(seed, 0x6d6f64656cull));
    const int c = cfg.slice_channels();
    const int h1 = cfg.M;
    const int h2 = std::max(cfg.M / 2, 2 * c);
    ga1 = EncoderBranch<T>(params, "ga1", cfg.N, cfg.M, 3, rng);
    if (cfg.use_tb) ga2 = EncoderBranch<T>(params, "ga2", cfg.N, cfg.M, 1, rng);
    const int y_total = cfg.use_tb ? 2 * cfg.M : cfg.M;
    ha = HyperEncoder<T>(params, "ha", y_total, cfg.hyper_channels, rng);
    hs = HyperDecoder<T>(params, "hs", cfg.hyper_channels, cfg.fz_channels(),
                         rng);
    gs = DecoderNet<T>(params, "gs", cfg.N, y_total, rng);
    prior = FactorizedPrior<T>(params, "prior", cfg.hyper_channels);
    for (int k = 0; k < cfg.G; ++k)
      stage1.emplace_back(params, "charm1.s" + std::to_string(k),
                          cfg.fz_channels() + k * c, h1, h2, c, rng);
    if (cfg.use_tb)
      for (int k = 0; k < cfg.G; ++k) {
        const int cin =
            cfg.fz_channels() + (cfg.use_ci ? cfg.M : 0) + k * c;
        stage2.emplace_back(params, "charm2.s" + std::to_string(k), cin, h1,
                            h2, c, rng);
      }
  }

  std::pair<Tensor<T>, Tensor<T>> encode_branches(const Tensor<T>& x) const {
    if (x.dim(0) != 3 || x.dim(1) % 64 != 0 || x.dim(2) % 64 != 0)
      throw shape_error(
          "encode_branches: input must be 3xHxW with H,W multiples of 64");
    auto y1 = ga1(x);
    Tensor<T> y2;
    if (cfg.use_tb) y2 = ga2(x);
    return {y1, y2};
  }

  Tensor<T> hyper_encode(const Tensor<T>& y1, const Tensor<T>& y2) const {
    if (cfg.use_tb) return ha(concat_channels<T>({y1, y2}));
    return ha(y1);
  }

  Tensor<T> hyper_decode(const Tensor<T>& zhat) const { return hs(zhat); }

  // Synthesis from noise-quantized or rounded latents; unclamped output
  // (the training loss sees this), clamp to [0,1] for display.
  Tensor<T> synthesize(const Tensor<T>& y1hat, const Tensor<T>& y2hat) const {
    if (cfg.use_tb) return gs(concat_channels<T>({y1hat, y2hat}));
    return gs(y1hat);
  }

  Tensor<T> decode_image(const Tensor<T>& y1hat,
                         const Tensor<T>& y2hat) const {
    return clamp(synthesize(y1hat, y2hat), T(0), T(1));
  }

  // Stage-1 slice-k parameters: pure function of (F_z, y1 slices < k).
  GaussianParams<T> charm_stage1_params(
      const Tensor<T>& fz, const std::vector<Tensor<T>>& y1_prefix,
      int k) const {
    if (int(y1_prefix.size()) != k)
      throw config_error("charm_stage1_params: prefix must hold k slices");
    std::vector<Tensor<T>> in{fz};
    in.insert(in.end(), y1_prefix.begin(), y1_prefix.end());
    return stage1[std::size_t(k)](concat_channels(in));
  }

  // Stage-2 slice-k parameters: (F_z, y1 full when use_ci, y2 slices < k).
  GaussianParams<T> charm_stage2_params(
      const Tensor<T>& fz, const Tensor<T>& y1_full,
      const std::vector<Tensor<T>>& y2_prefix, int k) const {
    if (int(y2_prefix.size()) != k)
      throw config_error("charm_stage2_params: prefix must hold k slices");
    std::vector<Tensor<T>> in{fz};
    if (cfg.use_ci) in.push_back(y1_full);
    in.insert(in.end(), y2_prefix.begin(), y2_prefix.end());
    return stage2[std::size_t(k)](concat_channels(in));
  }
};

}  // namespace dbcc
