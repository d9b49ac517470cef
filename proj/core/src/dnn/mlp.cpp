#include "quantbench/dnn/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace quantbench::dnn {

using bitkernels::QuantKind;

namespace {

// C (rows_a x rows_b) = A * B^T, both row-major; inner loops stream rows.
void matmul_nt(const RealMatrix& a, const RealMatrix& b, RealMatrix& c) {
  const std::size_t m = a.rows(), k = b.rows(), n = a.cols();
  for (std::size_t i = 0; i < m; ++i) {
    const double* ra = a.row(i).data();
    double* rc = c.row(i).data();
    for (std::size_t j = 0; j < k; ++j) {
      const double* rb = b.row(j).data();
      double acc = 0;
      for (std::size_t p = 0; p < n; ++p) acc += ra[p] * rb[p];
      rc[j] = acc;
    }
  }
}

int max_code(int bits) { return (1 << (bits - 1)) - 1; }

}  // namespace

double weight_grid_step(int bits) {
  if (bits < 2 || bits > 16) throw std::invalid_argument("weight grid: bits out of [2,16]");
  return std::ldexp(1.0, 1 - bits);
}

void QuantMLP::validate() const {
  if (specs.empty()) throw std::invalid_argument("mlp: no layers");
  if (weights.size() != specs.size() || bn.size() != specs.size() ||
      thresholds.size() != specs.size() || row_sign.size() != specs.size())
    throw std::invalid_argument("mlp: inconsistent layer arrays");
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const LayerSpec& s = specs[l];
    if (s.in_dim < 1 || s.out_dim < 1) throw std::invalid_argument("mlp: layer dims");
    if (l > 0 && s.in_dim != specs[l - 1].out_dim)
      throw std::invalid_argument("mlp: layer width mismatch");
    if (s.activation == Activation::linear_count) {
      if (l + 1 != specs.size())
        throw std::invalid_argument("mlp: only the final layer may be linear_count");
      if (s.use_batchnorm)
        throw std::invalid_argument("mlp: no batch norm on the counting layer");
    }
    auto k = s.weight_spec.kind;
    if (k != QuantKind::binary_scaled && k != QuantKind::fixed_point)
      throw std::invalid_argument("mlp: layer weights must be binary or fixed_point");
  }
}

QuantMLP make_mlp(std::vector<LayerSpec> specs, std::uint64_t seed) {
  QuantMLP net;
  net.specs = std::move(specs);
  Rng rng(seed);
  for (const LayerSpec& s : net.specs) {
    RealMatrix w(static_cast<std::size_t>(s.out_dim), static_cast<std::size_t>(s.in_dim));
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-0.5, 0.5);
    net.weights.push_back(std::move(w));

    BatchNorm b;
    if (s.use_batchnorm) {
      auto n = static_cast<std::size_t>(s.out_dim);
      b.gain.assign(n, 1.0);
      b.bias.assign(n, 0.0);
      b.running_mean.assign(n, 0.0);
      b.running_var.assign(n, 1.0);
    }
    net.bn.push_back(std::move(b));
    net.thresholds.emplace_back(static_cast<std::size_t>(s.out_dim), 0.0);
    net.row_sign.emplace_back(static_cast<std::size_t>(s.out_dim), std::int8_t{1});
  }
  net.validate();
  return net;
}

RealMatrix quantized_weights(const QuantMLP& net, int layer) {
  const LayerSpec& s = net.specs[static_cast<std::size_t>(layer)];
  const RealMatrix& w = net.weights[static_cast<std::size_t>(layer)];
  RealMatrix q(w.rows(), w.cols());
  if (s.weight_spec.kind == QuantKind::binary_scaled || s.weight_spec.bits == 1) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double sgn = net.row_sign[static_cast<std::size_t>(layer)][i];
      for (std::size_t j = 0; j < w.cols(); ++j) q(i, j) = (w(i, j) >= 0 ? 1.0 : -1.0) * sgn;
    }
    return q;
  }
  const double step = weight_grid_step(s.weight_spec.bits);
  const double cap = max_code(s.weight_spec.bits);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    double sgn = net.row_sign[static_cast<std::size_t>(layer)][i];
    for (std::size_t j = 0; j < w.cols(); ++j) {
      double code = std::round(w(i, j) / step);  // ties away from zero
      code = std::min(cap, std::max(-cap, code));
      q(i, j) = code * step * sgn;
    }
  }
  return q;
}

Matrix<std::int32_t> quantized_weight_codes(const QuantMLP& net, int layer) {
  const LayerSpec& s = net.specs[static_cast<std::size_t>(layer)];
  const RealMatrix& w = net.weights[static_cast<std::size_t>(layer)];
  Matrix<std::int32_t> q(w.rows(), w.cols());
  const bool binary = s.weight_spec.kind == QuantKind::binary_scaled || s.weight_spec.bits == 1;
  const double step = binary ? 1.0 : weight_grid_step(s.weight_spec.bits);
  const double cap = binary ? 1.0 : max_code(s.weight_spec.bits);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    int sgn = net.row_sign[static_cast<std::size_t>(layer)][i];
    for (std::size_t j = 0; j < w.cols(); ++j) {
      double code = binary ? (w(i, j) >= 0 ? 1.0 : -1.0)
                           : std::min(cap, std::max(-cap, std::round(w(i, j) / step)));
      q(i, j) = static_cast<std::int32_t>(code) * sgn;
    }
  }
  return q;
}

ForwardCache forward(const QuantMLP& net, const RealMatrix& x, ForwardMode mode, Rng* rng,
                     double dropout_rate) {
  net.validate();
  if (x.cols() != static_cast<std::size_t>(net.in_dim()))
    throw std::invalid_argument("forward: input width mismatch");
  const std::size_t batch = x.rows();
  const auto n_layers = static_cast<std::size_t>(net.n_layers());
  const bool training = mode == ForwardMode::train;
  if (training && dropout_rate > 0 && !rng)
    throw std::invalid_argument("forward: dropout needs an rng");

  ForwardCache cache;
  cache.mode = mode;
  cache.inputs.resize(n_layers);
  cache.preact.resize(n_layers);
  cache.normed.resize(n_layers);
  cache.outputs.resize(n_layers);
  cache.batch_mean.resize(n_layers);
  cache.batch_var.resize(n_layers);
  cache.dropout_keep.resize(n_layers);

  RealMatrix z = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const LayerSpec& spec = net.specs[l];
    cache.inputs[l] = z;

    RealMatrix wq;
    if (mode == ForwardMode::relaxed) {
      // surrogate-relaxed: quantizers become clip(w, -1, 1)
      const RealMatrix& w = net.weights[l];
      wq = RealMatrix(w.rows(), w.cols());
      for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j)
          wq(i, j) = std::min(1.0, std::max(-1.0, w(i, j))) * net.row_sign[l][i];
    } else {
      wq = quantized_weights(net, static_cast<int>(l));
    }

    RealMatrix a(batch, static_cast<std::size_t>(spec.out_dim));
    matmul_nt(z, wq, a);
    cache.preact[l] = a;

    RealMatrix& normed = cache.normed[l];
    normed = a;
    if (spec.use_batchnorm) {
      const BatchNorm& bnl = net.bn[l];
      const auto units = static_cast<std::size_t>(spec.out_dim);
      std::vector<double> mean(units, 0.0), var(units, 0.0);
      if (training) {
        for (std::size_t i = 0; i < batch; ++i)
          for (std::size_t u = 0; u < units; ++u) mean[u] += a(i, u);
        for (std::size_t u = 0; u < units; ++u) mean[u] /= static_cast<double>(batch);
        for (std::size_t i = 0; i < batch; ++i)
          for (std::size_t u = 0; u < units; ++u) {
            double d = a(i, u) - mean[u];
            var[u] += d * d;
          }
        for (std::size_t u = 0; u < units; ++u) var[u] /= static_cast<double>(batch);
      } else {
        mean = bnl.running_mean;
        var = bnl.running_var;
      }
      cache.batch_mean[l] = mean;
      cache.batch_var[l] = var;
      for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t u = 0; u < units; ++u)
          normed(i, u) = bnl.gain[u] * (a(i, u) - mean[u]) / std::sqrt(var[u] + bnl.eps) +
                         bnl.bias[u];
    } else {
      const auto& t = net.thresholds[l];
      for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t u = 0; u < t.size(); ++u) normed(i, u) -= t[u];
    }

    RealMatrix& out = cache.outputs[l];
    out = normed;
    if (spec.activation == Activation::sign) {
      if (mode == ForwardMode::relaxed) {
        for (std::size_t i = 0; i < batch; ++i)
          for (std::size_t u = 0; u < out.cols(); ++u)
            out(i, u) = std::min(1.0, std::max(-1.0, normed(i, u)));
      } else {
        for (std::size_t i = 0; i < batch; ++i)
          for (std::size_t u = 0; u < out.cols(); ++u)
            out(i, u) = normed(i, u) >= 0 ? 1.0 : -1.0;
      }
    }

    if (l + 1 < n_layers) {
      z = out;
      if (training && dropout_rate > 0) {
        auto& keep = cache.dropout_keep[l];
        keep = Matrix<std::uint8_t>(batch, out.cols());
        const double scale = 1.0 / (1.0 - dropout_rate);
        for (std::size_t i = 0; i < batch; ++i)
          for (std::size_t u = 0; u < out.cols(); ++u) {
            bool k = rng->next_double() >= dropout_rate;
            keep(i, u) = k;
            z(i, u) = k ? out(i, u) * scale : 0.0;
          }
      }
    } else {
      cache.logits = out;
    }
  }
  return cache;
}

Gradients ste_backward(const QuantMLP& net, const ForwardCache& cache, const RealMatrix& dlogits,
                       double dropout_rate) {
  const auto n_layers = static_cast<std::size_t>(net.n_layers());
  const std::size_t batch = dlogits.rows();
  const bool training = cache.mode == ForwardMode::train;

  Gradients g;
  g.weights.resize(n_layers);
  g.bn_gain.resize(n_layers);
  g.bn_bias.resize(n_layers);

  RealMatrix dz = dlogits;  // gradient w.r.t. the layer output fed forward
  for (std::size_t l = n_layers; l-- > 0;) {
    const LayerSpec& spec = net.specs[l];
    const auto units = static_cast<std::size_t>(spec.out_dim);

    // undo dropout scaling (applied to non-final layer outputs in training)
    if (training && dropout_rate > 0 && l + 1 < n_layers) {
      const auto& keep = cache.dropout_keep[l];
      const double scale = 1.0 / (1.0 - dropout_rate);
      for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t u = 0; u < units; ++u)
          dz(i, u) = keep(i, u) ? dz(i, u) * scale : 0.0;
    }

    // activation surrogate
    RealMatrix dnormed = dz;
    if (spec.activation == Activation::sign) {
      const RealMatrix& normed = cache.normed[l];
      for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t u = 0; u < units; ++u)
          if (std::fabs(normed(i, u)) > 1.0) dnormed(i, u) = 0.0;
    }

    // batch norm
    RealMatrix da(batch, units);
    if (spec.use_batchnorm) {
      const BatchNorm& bnl = net.bn[l];
      const RealMatrix& a = cache.preact[l];
      const auto& mean = cache.batch_mean[l];
      const auto& var = cache.batch_var[l];
      g.bn_gain[l].assign(units, 0.0);
      g.bn_bias[l].assign(units, 0.0);
      for (std::size_t u = 0; u < units; ++u) {
        const double sigma = std::sqrt(var[u] + bnl.eps);
        double dgain = 0, dbias = 0;
        for (std::size_t i = 0; i < batch; ++i) {
          dgain += dnormed(i, u) * (a(i, u) - mean[u]) / sigma;
          dbias += dnormed(i, u);
        }
        g.bn_gain[l][u] = dgain;
        g.bn_bias[l][u] = dbias;

        if (training) {
          // gradients flow through the batch statistics
          double sum_dxhat = 0, sum_dxhat_xhat = 0;
          for (std::size_t i = 0; i < batch; ++i) {
            double dxhat = dnormed(i, u) * bnl.gain[u];
            double xhat = (a(i, u) - mean[u]) / sigma;
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat;
          }
          const double inv_b = 1.0 / static_cast<double>(batch);
          for (std::size_t i = 0; i < batch; ++i) {
            double dxhat = dnormed(i, u) * bnl.gain[u];
            double xhat = (a(i, u) - mean[u]) / sigma;
            da(i, u) = (dxhat - inv_b * sum_dxhat - inv_b * xhat * sum_dxhat_xhat) / sigma;
          }
        } else {
          for (std::size_t i = 0; i < batch; ++i)
            da(i, u) = dnormed(i, u) * bnl.gain[u] / sigma;
        }
      }
    } else {
      da = dnormed;  // thresholds are constants
    }

    // weight gradient dWq = da^T * input, routed straight through to the
    // shadow weights inside the clip range
    const RealMatrix& in = cache.inputs[l];
    const RealMatrix& w = net.weights[l];
    RealMatrix dw(w.rows(), w.cols(), 0.0);
    for (std::size_t i = 0; i < batch; ++i) {
      const double* din = in.row(i).data();
      for (std::size_t u = 0; u < units; ++u) {
        const double dv = da(i, u) * net.row_sign[l][u];
        if (dv == 0.0) continue;
        double* drow = dw.row(u).data();
        for (std::size_t j = 0; j < in.cols(); ++j) drow[j] += dv * din[j];
      }
    }
    for (std::size_t u = 0; u < w.rows(); ++u)
      for (std::size_t j = 0; j < w.cols(); ++j)
        if (std::fabs(w(u, j)) > 1.0) dw(u, j) = 0.0;
    g.weights[l] = std::move(dw);

    if (l > 0) {
      // propagate to the previous layer's output
      RealMatrix wq = cache.mode == ForwardMode::relaxed ? RealMatrix() : quantized_weights(net, static_cast<int>(l));
      if (cache.mode == ForwardMode::relaxed) {
        wq = RealMatrix(w.rows(), w.cols());
        for (std::size_t i = 0; i < w.rows(); ++i)
          for (std::size_t j = 0; j < w.cols(); ++j)
            wq(i, j) = std::min(1.0, std::max(-1.0, w(i, j))) * net.row_sign[l][i];
      }
      RealMatrix dprev(batch, in.cols(), 0.0);
      for (std::size_t i = 0; i < batch; ++i) {
        double* dp = dprev.row(i).data();
        for (std::size_t u = 0; u < units; ++u) {
          const double dv = da(i, u);
          if (dv == 0.0) continue;
          const double* wrow = wq.row(u).data();
          for (std::size_t j = 0; j < in.cols(); ++j) dp[j] += dv * wrow[j];
        }
      }
      dz = std::move(dprev);
    }
  }
  return g;
}

void update_running_stats(QuantMLP& net, const ForwardCache& cache) {
  if (cache.mode != ForwardMode::train) return;
  for (std::size_t l = 0; l < net.specs.size(); ++l) {
    if (!net.specs[l].use_batchnorm) continue;
    BatchNorm& bnl = net.bn[l];
    for (std::size_t u = 0; u < bnl.running_mean.size(); ++u) {
      bnl.running_mean[u] =
          (1 - bnl.momentum) * bnl.running_mean[u] + bnl.momentum * cache.batch_mean[l][u];
      bnl.running_var[u] =
          (1 - bnl.momentum) * bnl.running_var[u] + bnl.momentum * cache.batch_var[l][u];
    }
  }
}

void fold_batchnorm(QuantMLP& net) {
  net.validate();
  if (net.folded) return;
  for (std::size_t l = 0; l < net.specs.size(); ++l) {
    LayerSpec& spec = net.specs[l];
    if (!spec.use_batchnorm) continue;
    BatchNorm& bnl = net.bn[l];
    for (std::size_t u = 0; u < static_cast<std::size_t>(spec.out_dim); ++u) {
      const double gain = bnl.gain[u];
      if (gain == 0.0) throw std::runtime_error("fold_batchnorm: non-invertible batchnorm");
      const double sigma = std::sqrt(bnl.running_var[u] + bnl.eps);
      const double t = bnl.running_mean[u] - bnl.bias[u] * sigma / gain;
      if (gain < 0) {
        net.row_sign[l][u] = static_cast<std::int8_t>(-net.row_sign[l][u]);
        net.thresholds[l][u] = -t;
      } else {
        net.thresholds[l][u] = t;
      }
    }
    spec.use_batchnorm = false;
    bnl = BatchNorm{};
  }
  net.folded = true;
}

}  // namespace quantbench::dnn
