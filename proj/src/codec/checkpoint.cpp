#include "dbcc/codec/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace dbcc {

namespace {

constexpr char kMagic[4] = {'D', 'B', 'C', 'K'};
constexpr std::uint8_t kVersion = 1;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(std::uint8_t((std::uint64_t(v) >> (8 * i)) & 0xFF));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_le(out, bits);
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_le(out, bits);
}

struct Reader {
  const std::uint8_t* p;
  std::size_t left;

  void need(std::size_t n) const {
    if (left < n) throw format_error("checkpoint: truncated");
  }
  template <typename T>
  T get_le() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= std::uint64_t(p[i]) << (8 * i);
    p += sizeof(T);
    left -= sizeof(T);
    return T(v);
  }
  float get_f32() {
    const std::uint32_t bits = get_le<std::uint32_t>();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  double get_f64() {
    const std::uint64_t bits = get_le<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(p), n);
    p += n;
    left -= n;
    return s;
  }
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Model<float>& model) {
  const ModelConfig& cfg = model.cfg;
  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kVersion);
  put_le(out, std::uint16_t(cfg.N));
  put_le(out, std::uint16_t(cfg.M));
  out.push_back(std::uint8_t(cfg.G));
  put_le(out, std::uint16_t(cfg.hyper_channels));
  out.push_back(std::uint8_t((cfg.use_ci ? 1 : 0) | (cfg.use_tb ? 2 : 0)));
  out.push_back(std::uint8_t(cfg.metric));
  put_f64(out, cfg.lambda);
  put_le(out, std::uint32_t(model.params.count()));
  for (std::size_t i = 0; i < model.params.count(); ++i) {
    const std::string& name = model.params.names[i];
    const Tensor<float>& t = model.params.tensors[i];
    put_le(out, std::uint16_t(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    out.push_back(std::uint8_t(t.ndim()));
    for (int d = 0; d < t.ndim(); ++d) put_le(out, std::uint32_t(t.dim(d)));
    for (std::size_t j = 0; j < t.size(); ++j) put_f32(out, t.data()[j]);
  }
  return out;
}

Model<float> deserialize_checkpoint(const std::uint8_t* data,
                                    std::size_t size) {
  Reader r{data, size};
  r.need(5);
  if (std::memcmp(r.p, kMagic, 4) != 0)
    throw format_error("checkpoint: bad magic, not a dbcc checkpoint");
  if (r.p[4] != kVersion)
    throw format_error("checkpoint: unsupported version");
  r.p += 5;
  r.left -= 5;

  ModelConfig cfg;
  cfg.N = r.get_le<std::uint16_t>();
  cfg.M = r.get_le<std::uint16_t>();
  cfg.G = r.get_le<std::uint8_t>();
  cfg.hyper_channels = r.get_le<std::uint16_t>();
  const std::uint8_t flags = r.get_le<std::uint8_t>();
  cfg.use_ci = (flags & 1) != 0;
  cfg.use_tb = (flags & 2) != 0;
  cfg.metric = DistortionMetric(r.get_le<std::uint8_t>());
  cfg.lambda = r.get_f64();
  cfg.validate();

  // Model construction is deterministic given the config, so the stored
  // blobs land on an identical parameter registry.
  Model<float> model(cfg);
  const std::uint32_t count = r.get_le<std::uint32_t>();
  if (count != model.params.count())
    throw format_error("checkpoint: parameter count does not match config");
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t name_len = r.get_le<std::uint16_t>();
    const std::string name = r.get_string(name_len);
    if (name != model.params.names[i])
      throw format_error("checkpoint: unexpected parameter '" + name + "'");
    Tensor<float>& t = model.params.tensors[i];
    const int ndim = r.get_le<std::uint8_t>();
    if (ndim != t.ndim())
      throw format_error("checkpoint: rank mismatch for '" + name + "'");
    for (int d = 0; d < ndim; ++d)
      if (int(r.get_le<std::uint32_t>()) != t.dim(d))
        throw format_error("checkpoint: shape mismatch for '" + name + "'");
    for (std::size_t j = 0; j < t.size(); ++j) t.data()[j] = r.get_f32();
  }
  if (r.left != 0) throw format_error("checkpoint: trailing bytes");
  return model;
}

void save_checkpoint(const std::string& path, const Model<float>& model) {
  const auto bytes = serialize_checkpoint(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw data_error("cannot open checkpoint file for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          std::streamsize(bytes.size()));
  if (!f) throw data_error("checkpoint write failed: " + path);
}

Model<float> load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot open checkpoint file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes.data(), bytes.size());
}

}  // namespace dbcc
