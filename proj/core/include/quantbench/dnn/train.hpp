#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quantbench/dnn/mlp.hpp"

namespace quantbench::dnn {

enum class Optimizer { sgd_momentum, adam_like };

struct TrainConfig {
  int epochs = 40;
  int batch_size = 100;
  double learning_rate = 0.003;
  double lr_decay = 0.5;      // multiplied in every lr_decay_every epochs
  int lr_decay_every = 15;
  Optimizer optimizer = Optimizer::adam_like;
  double dropout_rate = 0.25;
  double momentum = 0.9;      // sgd_momentum only
  std::uint64_t seed = 1;
};

/// Labeled batch of quantized inputs: codes on the {i/input_levels} grid.
struct CodedDataset {
  Matrix<std::uint8_t> codes;  // n x features
  std::vector<int> labels;
  int n_classes = 0;

  RealMatrix real_inputs(int levels) const;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0, train_err = 0, valid_err = 0;
};

struct TrainResult {
  QuantMLP net;  // best-validation snapshot, batch norm running stats final
  std::vector<EpochStats> history;
};

/// Deterministic STE training: minibatch softmax cross-entropy on the
/// counting logits, gradients applied to the clipped shadow weights.
/// Divergence (non-finite loss) aborts with a diagnostic.
TrainResult train_ste(const CodedDataset& train, const CodedDataset& valid,
                      std::vector<LayerSpec> specs, const TrainConfig& cfg);

/// Error of the eval-mode forward on a coded dataset.
double eval_error(const QuantMLP& net, const CodedDataset& data);

}  // namespace quantbench::dnn
