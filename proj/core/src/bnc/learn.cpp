#include "quantbench/bnc/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "quantbench/bnc/classify.hpp"
#include "quantbench/rng.hpp"

namespace quantbench::bnc {

namespace {

void require_complete(const data::DiscreteDataset& d) {
  if (d.n == 0) throw std::invalid_argument("learn: empty dataset");
  if (d.has_missing()) throw std::invalid_argument("learn: training data must be fully observed");
}

double logsumexp(std::span<const double> v) {
  double mx = *std::max_element(v.begin(), v.end());
  double acc = 0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

// Per-sample table addresses: value cell and parent row for each node.
struct SampleIndex {
  // feature tables: index into flattened table = c * class_stride + cell
  std::vector<std::size_t> cell;     // u * cols + v per feature
  std::vector<std::size_t> row;      // u (parent value) per feature
};

SampleIndex index_sample(const Structure& s, std::span<const std::uint8_t> x) {
  SampleIndex idx;
  idx.cell.resize(static_cast<std::size_t>(s.n_features));
  idx.row.resize(static_cast<std::size_t>(s.n_features));
  for (int f = 0; f < s.n_features; ++f) {
    int p = s.feature_parent[f];
    std::size_t u = p >= 0 ? x[static_cast<std::size_t>(p)] : 0;
    idx.row[f] = u;
    idx.cell[f] = u * static_cast<std::size_t>(s.cardinalities[f]) + x[static_cast<std::size_t>(f)];
  }
  return idx;
}

// Flattened normalized log tables plus layout strides.
struct LogTables {
  std::vector<double> prior;                 // n_classes
  std::vector<std::vector<double>> feature;  // per feature, rows*cols
  std::vector<std::size_t> class_stride;     // parent_card * cols per feature
  std::vector<std::size_t> rows_per_class;   // parent_card per feature
};

LogTables layout_of(const Structure& s) {
  LogTables t;
  t.prior.assign(static_cast<std::size_t>(s.n_classes), 0.0);
  t.feature.resize(static_cast<std::size_t>(s.n_features));
  t.class_stride.resize(static_cast<std::size_t>(s.n_features));
  t.rows_per_class.resize(static_cast<std::size_t>(s.n_features));
  for (int f = 0; f < s.n_features; ++f) {
    int p = s.feature_parent[f];
    std::size_t pc = p >= 0 ? static_cast<std::size_t>(s.cardinalities[p]) : 1;
    t.rows_per_class[f] = pc;
    t.class_stride[f] = pc * static_cast<std::size_t>(s.cardinalities[f]);
    t.feature[f].assign(static_cast<std::size_t>(s.n_classes) * t.class_stride[f], 0.0);
  }
  return t;
}

LogTables normalize_logits(const Structure& s, const std::vector<std::vector<double>>& theta) {
  LogTables t = layout_of(s);
  {
    double lse = logsumexp(theta[0]);
    for (std::size_t c = 0; c < t.prior.size(); ++c) t.prior[c] = theta[0][c] - lse;
  }
  for (int f = 0; f < s.n_features; ++f) {
    std::size_t cols = static_cast<std::size_t>(s.cardinalities[f]);
    std::size_t rows = static_cast<std::size_t>(s.n_classes) * t.rows_per_class[f];
    const auto& th = theta[static_cast<std::size_t>(f) + 1];
    auto& out = t.feature[f];
    for (std::size_t r = 0; r < rows; ++r) {
      double lse = logsumexp(std::span<const double>(th.data() + r * cols, cols));
      for (std::size_t v = 0; v < cols; ++v) out[r * cols + v] = th[r * cols + v] - lse;
    }
  }
  return t;
}

void scores_of(const Structure& s, const LogTables& t, const SampleIndex& idx,
               std::vector<double>& scores) {
  const std::size_t nc = t.prior.size();
  scores.assign(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c) scores[c] = t.prior[c];
  for (int f = 0; f < s.n_features; ++f) {
    const double* tab = t.feature[f].data();
    const std::size_t stride = t.class_stride[f], cell = idx.cell[static_cast<std::size_t>(f)];
    for (std::size_t c = 0; c < nc; ++c) scores[c] += tab[c * stride + cell];
  }
}

std::vector<std::vector<double>> theta_like(const Structure& s) {
  std::vector<std::vector<double>> theta;
  theta.push_back(std::vector<double>(static_cast<std::size_t>(s.n_classes), 0.0));
  LogTables t = layout_of(s);
  for (int f = 0; f < s.n_features; ++f) theta.push_back(t.feature[f]);
  return theta;
}

data::DiscreteDataset subset(const data::DiscreteDataset& d, std::span<const std::size_t> rows) {
  data::DiscreteDataset out;
  out.n = rows.size();
  out.n_features = d.n_features;
  out.n_classes = d.n_classes;
  out.cardinalities = d.cardinalities;
  out.features.resize(out.n * out.n_features);
  out.labels.resize(out.n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = d.row(rows[i]);
    std::copy(r.begin(), r.end(), out.features.begin() + static_cast<std::ptrdiff_t>(i * out.n_features));
    out.labels[i] = d.labels[rows[i]];
  }
  return out;
}

}  // namespace

CPTSet learn_ml(const data::DiscreteDataset& d, const Structure& s, double eps) {
  require_complete(d);
  if (eps <= 0) throw std::invalid_argument("learn_ml: eps must be positive");
  s.validate();

  CPTSet cpts = make_cpt_shapes(s);
  std::vector<std::vector<double>> counts;
  for (const auto& t : cpts.tables) counts.emplace_back(t.rows * t.cols, 0.0);

  for (std::size_t i = 0; i < d.n; ++i) {
    const int c = d.labels[i];
    counts[0][static_cast<std::size_t>(c)] += 1.0;
    SampleIndex idx = index_sample(s, d.row(i));
    for (int f = 0; f < s.n_features; ++f) {
      const auto& table = cpts.tables[static_cast<std::size_t>(f) + 1];
      std::size_t row = static_cast<std::size_t>(c) * (table.rows / s.n_classes) +
                        idx.row[static_cast<std::size_t>(f)];
      counts[static_cast<std::size_t>(f) + 1][row * table.cols +
                                              d.value(i, static_cast<std::size_t>(f))] += 1.0;
    }
  }

  for (std::size_t t = 0; t < cpts.tables.size(); ++t) {
    auto& table = cpts.tables[t];
    for (std::size_t r = 0; r < table.rows; ++r) {
      double total = 0;
      for (std::size_t v = 0; v < table.cols; ++v) total += counts[t][r * table.cols + v];
      double denom = total + eps * static_cast<double>(table.cols);
      for (std::size_t v = 0; v < table.cols; ++v)
        table.log_at(r, v) = std::log((counts[t][r * table.cols + v] + eps) / denom);
    }
  }
  return cpts;
}

CPTSet cpts_from_logits(const Structure& s, const std::vector<std::vector<double>>& theta) {
  LogTables t = normalize_logits(s, theta);
  CPTSet cpts = make_cpt_shapes(s);
  cpts.tables[0].logp = t.prior;
  for (int f = 0; f < s.n_features; ++f) cpts.tables[static_cast<std::size_t>(f) + 1].logp = t.feature[f];
  return cpts;
}

double objective_value(const data::DiscreteDataset& d, const Structure& s,
                       const std::vector<std::vector<double>>& theta,
                       const DiscriminativeObjective& obj) {
  LogTables t = normalize_logits(s, theta);
  const double log_gamma = std::log(obj.gamma);
  std::vector<double> scores;
  double acc = 0;
  for (std::size_t i = 0; i < d.n; ++i) {
    SampleIndex idx = index_sample(s, d.row(i));
    scores_of(s, t, idx, scores);
    const int c = d.labels[i];
    double margin_part = 0, ll_part = 0;
    if (obj.kind != DiscriminativeObjective::Kind::mcl) {
      double best_other = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < scores.size(); ++k)
        if (static_cast<int>(k) != c) best_other = std::max(best_other, scores[k]);
      margin_part = std::min(log_gamma, scores[static_cast<std::size_t>(c)] - best_other);
    }
    switch (obj.kind) {
      case DiscriminativeObjective::Kind::mcl:
        acc += scores[static_cast<std::size_t>(c)] - logsumexp(scores);
        break;
      case DiscriminativeObjective::Kind::mm:
        acc += margin_part;
        break;
      case DiscriminativeObjective::Kind::hybrid:
        ll_part = scores[static_cast<std::size_t>(c)];
        acc += obj.lambda * ll_part + (1 - obj.lambda) * margin_part;
        break;
    }
  }
  return acc / static_cast<double>(d.n);
}

std::vector<std::vector<double>> objective_gradient(const data::DiscreteDataset& d,
                                                    const Structure& s,
                                                    const std::vector<std::vector<double>>& theta,
                                                    const DiscriminativeObjective& obj) {
  LogTables t = normalize_logits(s, theta);
  const std::size_t nc = static_cast<std::size_t>(s.n_classes);
  const double log_gamma = std::log(obj.gamma);

  // Accumulate per-entry coefficients A and per-row totals R; the gradient
  // of a softmax-parameterized row is then A - R * softmax(row).
  std::vector<std::vector<double>> entry_coeff, row_coeff;
  entry_coeff.push_back(std::vector<double>(nc, 0.0));
  row_coeff.push_back(std::vector<double>(1, 0.0));
  for (int f = 0; f < s.n_features; ++f) {
    entry_coeff.push_back(std::vector<double>(t.feature[f].size(), 0.0));
    row_coeff.push_back(std::vector<double>(nc * t.rows_per_class[f], 0.0));
  }

  std::vector<double> scores, posterior(nc), weight(nc);
  for (std::size_t i = 0; i < d.n; ++i) {
    SampleIndex idx = index_sample(s, d.row(i));
    scores_of(s, t, idx, scores);
    const auto c = static_cast<std::size_t>(d.labels[i]);

    std::fill(weight.begin(), weight.end(), 0.0);
    double mm_scale = obj.kind == DiscriminativeObjective::Kind::hybrid ? 1 - obj.lambda : 1.0;
    switch (obj.kind) {
      case DiscriminativeObjective::Kind::mcl: {
        double lse = logsumexp(scores);
        for (std::size_t k = 0; k < nc; ++k) posterior[k] = std::exp(scores[k] - lse);
        for (std::size_t k = 0; k < nc; ++k) weight[k] = -posterior[k];
        weight[c] += 1.0;
        break;
      }
      case DiscriminativeObjective::Kind::hybrid:
        weight[c] += obj.lambda;
        [[fallthrough]];
      case DiscriminativeObjective::Kind::mm: {
        std::size_t runner = c == 0 ? 1 : 0;
        for (std::size_t k = 0; k < nc; ++k)
          if (k != c && scores[k] > scores[runner]) runner = k;
        double margin = scores[c] - scores[runner];
        if (margin < log_gamma) {  // subgradient 0 above the cap
          weight[c] += mm_scale;
          weight[runner] -= mm_scale;
        }
        break;
      }
    }

    for (std::size_t k = 0; k < nc; ++k) {
      double w = weight[k];
      if (w == 0.0) continue;
      entry_coeff[0][k] += w;
      row_coeff[0][0] += w;
      for (int f = 0; f < s.n_features; ++f) {
        entry_coeff[static_cast<std::size_t>(f) + 1][k * t.class_stride[f] +
                                                     idx.cell[static_cast<std::size_t>(f)]] += w;
        row_coeff[static_cast<std::size_t>(f) + 1][k * t.rows_per_class[f] +
                                                   idx.row[static_cast<std::size_t>(f)]] += w;
      }
    }
  }

  // grad = (A - R * p) / n
  std::vector<std::vector<double>> grad = theta_like(s);
  const double inv_n = 1.0 / static_cast<double>(d.n);
  for (std::size_t k = 0; k < nc; ++k)
    grad[0][k] = (entry_coeff[0][k] - row_coeff[0][0] * std::exp(t.prior[k])) * inv_n;
  for (int f = 0; f < s.n_features; ++f) {
    const std::size_t cols = static_cast<std::size_t>(s.cardinalities[f]);
    const std::size_t rows = nc * t.rows_per_class[f];
    auto& g = grad[static_cast<std::size_t>(f) + 1];
    const auto& a = entry_coeff[static_cast<std::size_t>(f) + 1];
    const auto& r = row_coeff[static_cast<std::size_t>(f) + 1];
    const auto& lp = t.feature[f];
    for (std::size_t row = 0; row < rows; ++row) {
      double rc = r[row];
      for (std::size_t v = 0; v < cols; ++v) {
        std::size_t e = row * cols + v;
        g[e] = (a[e] - rc * std::exp(lp[e])) * inv_n;
      }
    }
  }
  return grad;
}

namespace {

std::vector<std::vector<double>> logits_from_cpts(const CPTSet& cpts) {
  std::vector<std::vector<double>> theta;
  for (const auto& t : cpts.tables) theta.push_back(t.logp);
  return theta;
}

LearnResult ascend(const data::DiscreteDataset& d, const Structure& s,
                   const DiscriminativeObjective& obj, const GdConfig& cfg) {
  require_complete(d);
  s.validate();

  // held-out split for early stopping
  std::vector<std::size_t> order(d.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);
  rng.shuffle(order);
  std::size_t n_valid =
      cfg.valid_fraction > 0 ? static_cast<std::size_t>(cfg.valid_fraction * d.n) : 0;
  if (n_valid >= d.n) n_valid = 0;
  data::DiscreteDataset train =
      subset(d, std::span<const std::size_t>(order.data(), d.n - n_valid));
  data::DiscreteDataset valid =
      n_valid ? subset(d, std::span<const std::size_t>(order.data() + (d.n - n_valid), n_valid))
              : data::DiscreteDataset{};

  auto theta = logits_from_cpts(learn_ml(train, s, cfg.init_eps));
  double obj_val = objective_value(train, s, theta, obj);
  if (!std::isfinite(obj_val)) throw std::runtime_error("learn: non-finite objective");

  auto valid_ce = [&](const std::vector<std::vector<double>>& th) {
    BayesNetClassifier net{s, cpts_from_logits(s, th), obj.gamma};
    return classification_error(net, valid);
  };

  auto best_theta = theta;
  double best_ce = n_valid ? valid_ce(theta) : 0.0;
  int wait = 0, epoch = 0;
  double step = cfg.step;

  for (epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto grad = objective_gradient(train, s, theta, obj);
    auto trial = theta;
    for (std::size_t t = 0; t < trial.size(); ++t)
      for (std::size_t k = 0; k < trial[t].size(); ++k) trial[t][k] += step * grad[t][k];
    double trial_val = objective_value(train, s, trial, obj);
    if (!std::isfinite(trial_val)) throw std::runtime_error("learn: non-finite objective");

    if (trial_val < obj_val - cfg.tolerance) {
      step *= cfg.step_decay;  // reject the step, retry smaller
      if (step < cfg.min_step) break;
      --epoch;
      continue;
    }
    theta = std::move(trial);
    obj_val = trial_val;

    if (n_valid) {
      double ce = valid_ce(theta);
      if (ce < best_ce) {
        best_ce = ce;
        best_theta = theta;
        wait = 0;
      } else if (++wait >= cfg.patience) {
        break;
      }
    }
  }

  const auto& final_theta = n_valid ? best_theta : theta;
  LearnResult res;
  res.cpts = cpts_from_logits(s, final_theta);
  res.objective = objective_value(train, s, final_theta, obj);
  res.epochs_run = epoch;
  return res;
}

}  // namespace

LearnResult learn_mcl(const data::DiscreteDataset& d, const Structure& s, const GdConfig& cfg) {
  DiscriminativeObjective obj;
  obj.kind = DiscriminativeObjective::Kind::mcl;
  return ascend(d, s, obj, cfg);
}

LearnResult learn_mm(const data::DiscreteDataset& d, const Structure& s, double gamma,
                     const GdConfig& cfg) {
  if (gamma <= 1) throw std::invalid_argument("learn_mm: gamma must exceed 1");
  DiscriminativeObjective obj;
  obj.kind = DiscriminativeObjective::Kind::mm;
  obj.gamma = gamma;
  return ascend(d, s, obj, cfg);
}

LearnResult learn_hybrid(const data::DiscreteDataset& d, const Structure& s, double lambda,
                         double gamma, const GdConfig& cfg) {
  if (lambda < 0 || lambda > 1) throw std::invalid_argument("learn_hybrid: lambda out of [0,1]");
  if (gamma <= 1) throw std::invalid_argument("learn_hybrid: gamma must exceed 1");
  DiscriminativeObjective obj;
  obj.kind = DiscriminativeObjective::Kind::hybrid;
  obj.gamma = gamma;
  obj.lambda = lambda;
  return ascend(d, s, obj, cfg);
}

CPTSet learn_dfe(const data::DiscreteDataset& d, const Structure& s, int epochs,
                 double init_count) {
  require_complete(d);
  if (epochs < 1) throw std::invalid_argument("learn_dfe: epochs must be >= 1");
  s.validate();

  CPTSet shapes = make_cpt_shapes(s);
  std::vector<std::vector<double>> counts;
  for (const auto& t : shapes.tables) counts.emplace_back(t.rows * t.cols, init_count);

  auto normalize = [&]() {
    CPTSet cpts = make_cpt_shapes(s);
    for (std::size_t t = 0; t < cpts.tables.size(); ++t) {
      auto& table = cpts.tables[t];
      for (std::size_t r = 0; r < table.rows; ++r) {
        double total = 0;
        for (std::size_t v = 0; v < table.cols; ++v) total += counts[t][r * table.cols + v];
        for (std::size_t v = 0; v < table.cols; ++v)
          table.log_at(r, v) = std::log(counts[t][r * table.cols + v] / total);
      }
    }
    return cpts;
  };

  for (int e = 0; e < epochs; ++e) {
    BayesNetClassifier net{s, normalize(), 0.0};
    for (std::size_t i = 0; i < d.n; ++i) {
      Classification res = classify(net, d.row(i));
      double lse = logsumexp(res.scores);
      const auto c = static_cast<std::size_t>(d.labels[i]);
      double posterior = std::exp(res.scores[c] - lse);
      double w = 1.0 - posterior;
      if (w == 0.0) continue;
      counts[0][c] += w;
      SampleIndex idx = index_sample(s, d.row(i));
      for (int f = 0; f < s.n_features; ++f) {
        const auto& table = shapes.tables[static_cast<std::size_t>(f) + 1];
        std::size_t row = c * (table.rows / s.n_classes) + idx.row[static_cast<std::size_t>(f)];
        counts[static_cast<std::size_t>(f) + 1]
              [row * table.cols + d.value(i, static_cast<std::size_t>(f))] += w;
      }
    }
  }
  return normalize();
}

}  // namespace quantbench::bnc
