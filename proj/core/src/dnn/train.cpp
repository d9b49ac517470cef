#include "quantbench/dnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace quantbench::dnn {

RealMatrix CodedDataset::real_inputs(int levels) const {
  RealMatrix x(codes.rows(), codes.cols());
  // levels == 0: codes are sign bits, decoded to +-1
  const double scale = levels > 0 ? 1.0 / static_cast<double>(levels) : 0.0;
  for (std::size_t i = 0; i < codes.rows(); ++i)
    for (std::size_t j = 0; j < codes.cols(); ++j)
      x(i, j) = levels > 0 ? static_cast<double>(codes(i, j)) * scale
                           : (codes(i, j) ? 1.0 : -1.0);
  return x;
}

namespace {

struct AdamState {
  std::vector<double> m, v;
  void init(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  }
};

// Softmax cross-entropy over a batch; returns mean loss, writes dlogits.
double softmax_ce(const RealMatrix& logits, std::span<const int> labels, RealMatrix& dlogits,
                  std::size_t* errors) {
  const std::size_t b = logits.rows(), c = logits.cols();
  dlogits = RealMatrix(b, c);
  double loss = 0;
  for (std::size_t i = 0; i < b; ++i) {
    auto row = logits.row(i);
    double mx = *std::max_element(row.begin(), row.end());
    double z = 0;
    for (double v : row) z += std::exp(v - mx);
    const auto label = static_cast<std::size_t>(labels[i]);
    loss += -(row[label] - mx - std::log(z));
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < c; ++k)
      if (row[k] > row[argmax]) argmax = k;
    if (errors && argmax != label) ++*errors;
    for (std::size_t k = 0; k < c; ++k) {
      double p = std::exp(row[k] - mx) / z;
      dlogits(i, k) = (p - (k == label ? 1.0 : 0.0)) / static_cast<double>(b);
    }
  }
  return loss / static_cast<double>(b);
}

void clip_weights(QuantMLP& net) {
  for (auto& w : net.weights)
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = std::min(1.0, std::max(-1.0, w(i, j)));
}

}  // namespace

double eval_error(const QuantMLP& net, const CodedDataset& data) {
  RealMatrix x = data.real_inputs(net.input_levels);
  ForwardCache cache = forward(net, x, ForwardMode::eval);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = cache.logits.row(i);
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < row.size(); ++k)
      if (row[k] > row[argmax]) argmax = k;
    if (static_cast<int>(argmax) != data.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(x.rows());
}

TrainResult train_ste(const CodedDataset& train, const CodedDataset& valid,
                      std::vector<LayerSpec> specs, const TrainConfig& cfg) {
  if (train.codes.rows() == 0) throw std::invalid_argument("train_ste: empty dataset");
  for (int label : train.labels)
    if (label < 0 || label >= train.n_classes)
      throw std::invalid_argument("train_ste: label out of range");

  QuantMLP net = make_mlp(std::move(specs), cfg.seed);
  Rng rng(mix_seed(cfg.seed, 0x7ea1));

  RealMatrix x_all = train.real_inputs(net.input_levels);
  const std::size_t n = x_all.rows();
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  // one optimizer slot per tensor: weights then bn gain/bias per layer
  std::vector<AdamState> wstate(net.weights.size());
  std::vector<AdamState> gstate(net.weights.size()), bstate(net.weights.size());
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    wstate[l].init(net.weights[l].size());
    if (net.specs[l].use_batchnorm) {
      gstate[l].init(net.bn[l].gain.size());
      bstate[l].init(net.bn[l].bias.size());
    }
  }
  std::vector<RealMatrix> wmom(net.weights.size());
  std::vector<std::vector<double>> gmom(net.weights.size()), bmom(net.weights.size());
  if (cfg.optimizer == Optimizer::sgd_momentum) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      wmom[l] = RealMatrix(net.weights[l].rows(), net.weights[l].cols(), 0.0);
      if (net.specs[l].use_batchnorm) {
        gmom[l].assign(net.bn[l].gain.size(), 0.0);
        bmom[l].assign(net.bn[l].bias.size(), 0.0);
      }
    }
  }

  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  std::int64_t step_count = 0;
  auto adam_step = [&](AdamState& st, std::span<double> param, std::span<const double> grad,
                       double lr) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      st.m[i] = beta1 * st.m[i] + (1 - beta1) * grad[i];
      st.v[i] = beta2 * st.v[i] + (1 - beta2) * grad[i] * grad[i];
      double mhat = st.m[i] / (1 - std::pow(beta1, static_cast<double>(step_count)));
      double vhat = st.v[i] / (1 - std::pow(beta2, static_cast<double>(step_count)));
      param[i] -= lr * mhat / (std::sqrt(vhat) + adam_eps);
    }
  };
  auto sgd_step = [&](std::span<double> mom, std::span<double> param,
                      std::span<const double> grad, double lr) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      mom[i] = cfg.momentum * mom[i] - lr * grad[i];
      param[i] += mom[i];
    }
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  QuantMLP best = net;
  double best_valid = 1.0;
  double lr = cfg.learning_rate;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (epoch > 0 && cfg.lr_decay_every > 0 && epoch % cfg.lr_decay_every == 0)
      lr *= cfg.lr_decay;
    rng.shuffle(order);

    double loss_sum = 0;
    std::size_t err_sum = 0, seen = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t b = std::min(batch_size, n - start);
      RealMatrix xb(b, x_all.cols());
      std::vector<int> yb(b);
      for (std::size_t i = 0; i < b; ++i) {
        std::size_t src = order[start + i];
        std::copy(x_all.row(src).begin(), x_all.row(src).end(), xb.row(i).begin());
        yb[i] = train.labels[src];
      }

      ForwardCache cache = forward(net, xb, ForwardMode::train, &rng, cfg.dropout_rate);
      RealMatrix dlogits;
      std::size_t errs = 0;
      double loss = softmax_ce(cache.logits, yb, dlogits, &errs);
      if (!std::isfinite(loss))
        throw std::runtime_error("train_ste: loss diverged (non-finite) at epoch " +
                                 std::to_string(epoch));
      update_running_stats(net, cache);
      Gradients grads = ste_backward(net, cache, dlogits, cfg.dropout_rate);

      ++step_count;
      for (std::size_t l = 0; l < net.weights.size(); ++l) {
        std::span<double> wp(net.weights[l].data(), net.weights[l].size());
        std::span<const double> wg(grads.weights[l].data(), grads.weights[l].size());
        if (cfg.optimizer == Optimizer::adam_like)
          adam_step(wstate[l], wp, wg, lr);
        else
          sgd_step({wmom[l].data(), wmom[l].size()}, wp, wg, lr);
        if (net.specs[l].use_batchnorm) {
          if (cfg.optimizer == Optimizer::adam_like) {
            adam_step(gstate[l], net.bn[l].gain, grads.bn_gain[l], lr);
            adam_step(bstate[l], net.bn[l].bias, grads.bn_bias[l], lr);
          } else {
            sgd_step(gmom[l], net.bn[l].gain, grads.bn_gain[l], lr);
            sgd_step(bmom[l], net.bn[l].bias, grads.bn_bias[l], lr);
          }
        }
      }
      clip_weights(net);

      loss_sum += loss * static_cast<double>(b);
      err_sum += errs;
      seen += b;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(seen);
    stats.train_err = static_cast<double>(err_sum) / static_cast<double>(seen);
    stats.valid_err = valid.codes.rows() ? eval_error(net, valid) : 0.0;
    result.history.push_back(stats);

    if (valid.codes.rows() && stats.valid_err <= best_valid) {
      best_valid = stats.valid_err;
      best = net;
    }
  }

  result.net = valid.codes.rows() ? best : net;
  return result;
}

}  // namespace quantbench::dnn
