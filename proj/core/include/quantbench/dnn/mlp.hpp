#pragma once

#include <cstdint>
#include <vector>

#include "quantbench/bitkernels/quant_spec.hpp"
#include "quantbench/matrix.hpp"
#include "quantbench/rng.hpp"

namespace quantbench::dnn {

enum class Activation { sign, linear_count };

struct LayerSpec {
  int in_dim = 0, out_dim = 0;
  bitkernels::QuantSpec weight_spec = bitkernels::QuantSpec::binary();
  Activation activation = Activation::sign;
  bool use_batchnorm = false;
};

struct BatchNorm {
  std::vector<double> gain, bias, running_mean, running_var;
  double eps = 1e-5;
  double momentum = 0.1;
};

/// Feed-forward quantized net: full-precision shadow weights quantized on
/// every forward pass, sign activations, optional per-unit batch norm.
/// Shadow weights live in [-1, 1]; quantization grids for k-bit layers use
/// power-of-two steps (code * 2^(1-k)) so the real-arithmetic forward and
/// the integer forward produce bit-identical pre-activations.
struct QuantMLP {
  std::vector<LayerSpec> specs;
  std::vector<RealMatrix> weights;              // shadow, out_dim x in_dim
  std::vector<BatchNorm> bn;                    // aligned with specs; empty fields if unused
  std::vector<std::vector<double>> thresholds;  // per unit, valid once folded
  std::vector<std::vector<std::int8_t>> row_sign;  // folding flips rows of negative-gain units
  bool folded = false;
  int input_levels = 256;  // first layer consumes codes on the {i/256} grid

  int n_layers() const { return static_cast<int>(specs.size()); }
  int in_dim() const { return specs.empty() ? 0 : specs.front().in_dim; }
  int out_dim() const { return specs.empty() ? 0 : specs.back().out_dim; }
  void validate() const;
};

/// Fresh net with uniform(-0.5, 0.5) shadow weights, identity batch norm.
QuantMLP make_mlp(std::vector<LayerSpec> specs, std::uint64_t seed);

/// Step of the k-bit weight grid (k >= 2): 2^(1-k), symmetric codes.
double weight_grid_step(int bits);

/// Shadow weights snapped to the layer's grid (sign for binary layers).
RealMatrix quantized_weights(const QuantMLP& net, int layer);
/// Same grid points as integer codes (sign = +-1 for binary layers).
Matrix<std::int32_t> quantized_weight_codes(const QuantMLP& net, int layer);

enum class ForwardMode {
  train,     // batch statistics, quantized weights
  eval,      // running statistics / folded thresholds, quantized weights
  relaxed,   // surrogate-relaxed: hard-tanh activations, clipped raw weights
};

struct ForwardCache {
  ForwardMode mode = ForwardMode::train;
  std::vector<RealMatrix> inputs;    // Z_{l-1} per layer (batch major)
  std::vector<RealMatrix> preact;    // A = Wq * z
  std::vector<RealMatrix> normed;    // after batchnorm (or A - threshold when none)
  std::vector<RealMatrix> outputs;   // Z per layer, before dropout
  std::vector<std::vector<double>> batch_mean, batch_var;
  std::vector<Matrix<std::uint8_t>> dropout_keep;
  RealMatrix logits;
};

/// Runs the network on a real-valued batch (rows = samples). In train mode
/// `rng` drives dropout and the cache carries the batch statistics; the
/// function itself never mutates the net (the training loop folds the batch
/// statistics into the running ones via update_running_stats).
ForwardCache forward(const QuantMLP& net, const RealMatrix& x, ForwardMode mode,
                     Rng* rng = nullptr, double dropout_rate = 0.0);

/// Moves a train-mode cache's batch statistics into the running estimates.
void update_running_stats(QuantMLP& net, const ForwardCache& cache);

/// Per-layer shadow-weight and batch-norm gradients for a cached forward.
struct Gradients {
  std::vector<RealMatrix> weights;
  std::vector<std::vector<double>> bn_gain, bn_bias;
};

/// Backpropagation through the cached forward with the straight-through
/// surrogates: d sign(a)/da ~ 1[|a| <= 1], d Q(w)/dw ~ 1[|w| <= 1]. On a
/// relaxed-mode cache this is the exact gradient of the relaxed network.
Gradients ste_backward(const QuantMLP& net, const ForwardCache& cache,
                       const RealMatrix& dlogits, double dropout_rate = 0.0);

/// Rewrites batch norms into per-unit thresholds t = mean - bias*sigma/gain,
/// negating the weight rows of units with negative gain. The folded forward
/// equals the unfolded one on every input; gain 0 is rejected.
void fold_batchnorm(QuantMLP& net);

}  // namespace quantbench::dnn
