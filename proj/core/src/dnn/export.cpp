#include "quantbench/dnn/export.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "quantbench/bitkernels/binary_gemm.hpp"

namespace quantbench::dnn {

using bitkernels::BitMatrix;
using bitkernels::FixedTensor;
using bitkernels::QuantKind;

namespace {

void put_u64_le(std::ostream& os, std::uint64_t v) {
  std::array<unsigned char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64_le(std::istream& is) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), 8);
  if (!is) throw std::runtime_error("bundle: truncated payload");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

void save_fixed(const FixedTensor& t, std::ostream& os) {
  os.write("QFT1", 4);
  put_u64_le(os, t.rows);
  put_u64_le(os, t.cols);
  put_u64_le(os, static_cast<std::uint64_t>(t.bits));
  put_u64_le(os, std::bit_cast<std::uint64_t>(t.scale));
  for (std::int64_t v : t.values) put_u64_le(os, static_cast<std::uint64_t>(v));
}

FixedTensor load_fixed(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "QFT1", 4) != 0) throw std::runtime_error("bundle: bad QFT1 magic");
  FixedTensor t;
  t.rows = get_u64_le(is);
  t.cols = get_u64_le(is);
  t.bits = static_cast<int>(get_u64_le(is));
  t.scale = std::bit_cast<double>(get_u64_le(is));
  t.values.resize(t.rows * t.cols);
  for (auto& v : t.values) v = static_cast<std::int64_t>(get_u64_le(is));
  return t;
}

}  // namespace

std::size_t PackedNet::logical_weight_bits() const {
  std::size_t bits = 0;
  for (const auto& l : layers) {
    std::size_t entries = static_cast<std::size_t>(l.in_dim) * static_cast<std::size_t>(l.out_dim);
    bits += entries * (l.binary ? 1 : static_cast<std::size_t>(l.wfixed.bits));
  }
  return bits;
}

PackedNet export_packed(const QuantMLP& net) {
  if (net.specs.empty()) throw std::invalid_argument("export_packed: empty net");
  if (!net.folded) throw std::invalid_argument("export_packed: net must be folded first");
  net.validate();

  PackedNet packed;
  packed.input_levels = net.input_levels;

  for (int l = 0; l < net.n_layers(); ++l) {
    const LayerSpec& spec = net.specs[static_cast<std::size_t>(l)];
    PackedLayer out;
    out.in_dim = spec.in_dim;
    out.out_dim = spec.out_dim;
    out.activation = spec.activation;
    out.binary = spec.weight_spec.kind == QuantKind::binary_scaled || spec.weight_spec.bits == 1;

    Matrix<std::int32_t> codes = quantized_weight_codes(net, l);
    double wstep = out.binary ? 1.0 : weight_grid_step(spec.weight_spec.bits);
    if (out.binary) {
      out.wbits = BitMatrix(codes.rows(), codes.cols());
      for (std::size_t i = 0; i < codes.rows(); ++i)
        for (std::size_t j = 0; j < codes.cols(); ++j)
          if (codes(i, j) > 0) out.wbits.set_bit(i, j, true);
    } else {
      out.wfixed.rows = codes.rows();
      out.wfixed.cols = codes.cols();
      out.wfixed.bits = spec.weight_spec.bits;
      out.wfixed.scale = wstep;
      out.wfixed.values.assign(codes.data(), codes.data() + codes.size());
    }

    if (spec.activation == Activation::sign) {
      // accumulator-unit thresholds: sign(a - t) == (acc >= ceil(t / s)),
      // s the exact power-of-two scale of this layer's products
      const double in_scale = l == 0 ? 1.0 / static_cast<double>(net.input_levels) : 1.0;
      const double s = wstep * in_scale;
      out.thresholds.resize(static_cast<std::size_t>(spec.out_dim));
      for (std::size_t u = 0; u < out.thresholds.size(); ++u)
        out.thresholds[u] =
            static_cast<std::int64_t>(std::ceil(net.thresholds[static_cast<std::size_t>(l)][u] / s));
    }
    packed.layers.push_back(std::move(out));
  }
  return packed;
}

std::vector<std::int64_t> packed_forward(const PackedNet& net,
                                         std::span<const std::uint8_t> codes) {
  if (net.layers.empty()) throw std::invalid_argument("packed_forward: empty net");
  if (codes.size() != static_cast<std::size_t>(net.layers.front().in_dim))
    throw std::invalid_argument("packed_forward: input width mismatch");

  std::vector<std::int64_t> z(codes.begin(), codes.end());
  BitMatrix zbits;  // packed +-1 activations once past the first layer
  bool z_is_packed = false;

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const PackedLayer& layer = net.layers[l];
    std::vector<std::int64_t> acc(static_cast<std::size_t>(layer.out_dim), 0);

    if (layer.binary && z_is_packed) {
      for (std::size_t u = 0; u < acc.size(); ++u)
        acc[u] = bitkernels::binary_dot(layer.wbits, u, zbits, 0);
    } else if (layer.binary) {
      for (std::size_t u = 0; u < acc.size(); ++u) {
        std::int64_t a = 0;
        for (std::size_t j = 0; j < z.size(); ++j)
          a += layer.wbits.bit(u, j) ? z[j] : -z[j];
        acc[u] = a;
      }
    } else {
      for (std::size_t u = 0; u < acc.size(); ++u) {
        std::int64_t a = 0;
        for (std::size_t j = 0; j < z.size(); ++j) a += layer.wfixed.at(u, j) * z[j];
        acc[u] = a;
      }
    }

    if (layer.activation == Activation::linear_count) return acc;

    // sign activation against integer thresholds
    z.resize(acc.size());
    for (std::size_t u = 0; u < acc.size(); ++u)
      z[u] = acc[u] >= layer.thresholds[u] ? 1 : -1;
    std::vector<double> zd(z.begin(), z.end());
    zbits = bitkernels::pack_signs(zd);
    z_is_packed = true;
  }
  return z;
}

int packed_predict(const PackedNet& net, std::span<const std::uint8_t> codes) {
  auto logits = packed_forward(net, codes);
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < logits.size(); ++k)
    if (logits[k] > logits[argmax]) argmax = k;
  return static_cast<int>(argmax);
}

double packed_error(const PackedNet& net, const CodedDataset& data) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.codes.rows(); ++i) {
    auto row = data.codes.row(i);
    if (packed_predict(net, {row.data(), row.size()}) != data.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.codes.rows());
}

void save_bundle(const PackedNet& net, const std::string& stem) {
  nlohmann::json manifest;
  manifest["format"] = "quantbench-dnn";
  manifest["version"] = 1;
  manifest["input_levels"] = net.input_levels;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers) {
    layers.push_back({{"binary", l.binary},
                      {"in", l.in_dim},
                      {"out", l.out_dim},
                      {"activation", l.activation == Activation::sign ? "sign" : "linear_count"},
                      {"thresholds", l.thresholds.size()}});
  }
  manifest["layers"] = layers;

  std::ofstream mf(stem + ".json");
  if (!mf) throw std::runtime_error("bundle: cannot open " + stem + ".json");
  mf << manifest.dump(1, '\t') << "\n";

  std::ofstream pf(stem + ".bin", std::ios::binary);
  if (!pf) throw std::runtime_error("bundle: cannot open " + stem + ".bin");
  for (const auto& l : net.layers) {
    if (l.binary)
      bitkernels::save_bitmatrix(l.wbits, pf);
    else
      save_fixed(l.wfixed, pf);
    for (std::int64_t t : l.thresholds) put_u64_le(pf, static_cast<std::uint64_t>(t));
  }
}

PackedNet load_bundle(const std::string& stem) {
  std::ifstream mf(stem + ".json");
  if (!mf) throw std::runtime_error("bundle: cannot open " + stem + ".json");
  nlohmann::json manifest = nlohmann::json::parse(mf);
  if (manifest.value("format", "") != "quantbench-dnn")
    throw std::runtime_error("bundle: bad manifest format");

  PackedNet net;
  net.input_levels = manifest["input_levels"].get<int>();

  std::ifstream pf(stem + ".bin", std::ios::binary);
  if (!pf) throw std::runtime_error("bundle: cannot open " + stem + ".bin");
  for (const auto& jl : manifest["layers"]) {
    PackedLayer l;
    l.binary = jl["binary"].get<bool>();
    l.in_dim = jl["in"].get<int>();
    l.out_dim = jl["out"].get<int>();
    l.activation = jl["activation"].get<std::string>() == "sign" ? Activation::sign
                                                                 : Activation::linear_count;
    if (l.binary)
      l.wbits = bitkernels::load_bitmatrix(pf);
    else
      l.wfixed = load_fixed(pf);
    l.thresholds.resize(jl["thresholds"].get<std::size_t>());
    for (auto& t : l.thresholds) t = static_cast<std::int64_t>(get_u64_le(pf));
    net.layers.push_back(std::move(l));
  }
  return net;
}

std::size_t bundle_bytes(const std::string& stem) {
  namespace fs = std::filesystem;
  return static_cast<std::size_t>(fs::file_size(stem + ".json")) +
         static_cast<std::size_t>(fs::file_size(stem + ".bin"));
}

}  // namespace quantbench::dnn
