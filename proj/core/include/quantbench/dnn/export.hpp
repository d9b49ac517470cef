#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quantbench/bitkernels/bit_matrix.hpp"
#include "quantbench/bitkernels/fixed_tensor.hpp"
#include "quantbench/dnn/train.hpp"

namespace quantbench::dnn {

/// One exported layer: binary rows packed as a BitMatrix, k-bit rows as a
/// FixedTensor of codes; thresholds in accumulator units (integer compare).
struct PackedLayer {
  bool binary = true;
  bitkernels::BitMatrix wbits;
  bitkernels::FixedTensor wfixed;
  std::vector<std::int64_t> thresholds;  // empty for the counting layer
  Activation activation = Activation::sign;
  int in_dim = 0, out_dim = 0;
};

/// Integer-only inference bundle. Reproduces the folded eval forward
/// bit-exactly: every pre-activation is an integer accumulator compared
/// against an integer threshold.
struct PackedNet {
  std::vector<PackedLayer> layers;
  int input_levels = 256;

  int out_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }
  /// Sum over layers of (weight entries * weight bits), the paper-style
  /// parameter size. Thresholds and metadata excluded.
  std::size_t logical_weight_bits() const;
};

/// Packs a folded net. Unfolded or empty nets are rejected.
PackedNet export_packed(const QuantMLP& net);

/// Integer forward: logits of one instance of input codes.
std::vector<std::int64_t> packed_forward(const PackedNet& net,
                                         std::span<const std::uint8_t> codes);
int packed_predict(const PackedNet& net, std::span<const std::uint8_t> codes);
double packed_error(const PackedNet& net, const CodedDataset& data);

/// Bundle on disk: "<stem>.json" manifest + "<stem>.bin" payload holding
/// each layer in the bitkernels serialization. Byte-exact round-trip.
void save_bundle(const PackedNet& net, const std::string& stem);
PackedNet load_bundle(const std::string& stem);
/// Payload bytes of the two bundle files.
std::size_t bundle_bytes(const std::string& stem);

}  // namespace quantbench::dnn
