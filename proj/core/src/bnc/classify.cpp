#include "quantbench/bnc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quantbench::bnc {

namespace {

std::size_t row_of(const Structure& s, int feature, int c, std::span<const std::uint8_t> x) {
  int p = s.feature_parent[feature];
  std::size_t u = p >= 0 ? x[static_cast<std::size_t>(p)] : 0;
  std::size_t rows_per_class = p >= 0 ? static_cast<std::size_t>(s.cardinalities[p]) : 1;
  return static_cast<std::size_t>(c) * rows_per_class + u;
}

bool observed(std::span<const std::uint8_t> mask, std::size_t f) {
  return mask.empty() || mask[f] == 0;
}

// Exact elimination of the missing variables by sum-product over the
// feature forest, one pass per class. Messages are rescaled by their
// maximum to stay in range; the scale logs accumulate into the score.
double tree_marginal_score(const BayesNetClassifier& net, int c,
                           std::span<const std::uint8_t> x,
                           std::span<const std::uint8_t> mask) {
  const Structure& s = net.structure;
  auto children = s.children();
  auto order = s.topo_order();

  // messages indexed by feature: msg[f][u] for parent value u (size 1 for roots)
  std::vector<std::vector<double>> msg(static_cast<std::size_t>(s.n_features));
  double log_scale = 0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int f = *it;
    int p = s.feature_parent[f];
    std::size_t parent_vals = p >= 0 ? static_cast<std::size_t>(s.cardinalities[p]) : 1;
    std::size_t card = static_cast<std::size_t>(s.cardinalities[f]);
    std::vector<double> m(parent_vals, 0.0);

    for (std::size_t u = 0; u < parent_vals; ++u) {
      std::size_t row = static_cast<std::size_t>(c) * parent_vals + u;
      double sum = 0;
      const bool is_obs = observed(mask, static_cast<std::size_t>(f));
      for (std::size_t v = 0; v < card; ++v) {
        if (is_obs && v != x[static_cast<std::size_t>(f)]) continue;
        double term = std::exp(net.cpts.entry(static_cast<std::size_t>(f) + 1, row, v));
        for (int g : children[f]) term *= msg[static_cast<std::size_t>(g)][v];
        sum += term;
      }
      m[u] = sum;
    }

    double mx = *std::max_element(m.begin(), m.end());
    if (mx > 0) {
      for (double& v : m) v /= mx;
      log_scale += std::log(mx);
    }
    msg[static_cast<std::size_t>(f)] = std::move(m);
  }

  double score = net.cpts.entry(0, 0, static_cast<std::size_t>(c)) + log_scale;
  for (int f = 0; f < s.n_features; ++f)
    if (s.feature_parent[f] < 0) score += std::log(msg[static_cast<std::size_t>(f)][0]);
  return score;
}

}  // namespace

Classification classify(const BayesNetClassifier& net, std::span<const std::uint8_t> instance,
                        std::span<const std::uint8_t> missing_mask) {
  const Structure& s = net.structure;
  if (instance.size() != static_cast<std::size_t>(s.n_features))
    throw std::invalid_argument("classify: instance arity mismatch");
  if (!missing_mask.empty() && missing_mask.size() != instance.size())
    throw std::invalid_argument("classify: mask arity mismatch");

  bool any_missing = false;
  for (std::size_t f = 0; f < instance.size(); ++f) {
    if (!observed(missing_mask, f)) {
      any_missing = true;
      continue;
    }
    if (instance[f] >= s.cardinalities[f])
      throw std::invalid_argument("classify: observed value out of range");
  }

  const auto nc = static_cast<std::size_t>(s.n_classes);
  Classification out;

  if (net.cpts.repr == CptRepr::fixed_point && (!any_missing || s.is_naive_bayes())) {
    // Pure integer scoring: sum the stored codes, no decoding involved.
    out.integer_path = true;
    out.int_scores.assign(nc, 0);
    for (std::size_t c = 0; c < nc; ++c) {
      std::int64_t acc = net.cpts.tables[0].code_at(0, c);
      for (int f = 0; f < s.n_features; ++f) {
        if (!observed(missing_mask, static_cast<std::size_t>(f))) continue;
        std::size_t row = row_of(s, f, static_cast<int>(c), instance);
        acc += net.cpts.tables[static_cast<std::size_t>(f) + 1].code_at(
            row, instance[static_cast<std::size_t>(f)]);
      }
      out.int_scores[c] = acc;
    }
    out.scores.assign(out.int_scores.begin(), out.int_scores.end());
    out.predicted = 0;
    for (std::size_t c = 1; c < nc; ++c)
      if (out.int_scores[c] > out.int_scores[static_cast<std::size_t>(out.predicted)])
        out.predicted = static_cast<int>(c);
    return out;
  }

  out.scores.assign(nc, 0.0);
  if (!any_missing || s.is_naive_bayes()) {
    // fully observed, or naive Bayes where missing factors are omitted
    for (std::size_t c = 0; c < nc; ++c) {
      double acc = net.cpts.entry(0, 0, c);
      for (int f = 0; f < s.n_features; ++f) {
        if (!observed(missing_mask, static_cast<std::size_t>(f))) continue;
        std::size_t row = row_of(s, f, static_cast<int>(c), instance);
        acc += net.cpts.entry(static_cast<std::size_t>(f) + 1, row,
                              instance[static_cast<std::size_t>(f)]);
      }
      out.scores[c] = acc;
    }
  } else {
    for (std::size_t c = 0; c < nc; ++c)
      out.scores[c] = tree_marginal_score(net, static_cast<int>(c), instance, missing_mask);
  }

  out.predicted = 0;
  for (std::size_t c = 1; c < nc; ++c)
    if (out.scores[c] > out.scores[static_cast<std::size_t>(out.predicted)])
      out.predicted = static_cast<int>(c);
  return out;
}

double classification_error(const BayesNetClassifier& net, const data::DiscreteDataset& d) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < d.n; ++i) {
    Classification r = classify(net, d.row(i), d.mask_row(i));
    if (r.predicted != d.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(d.n);
}

double classification_error_masked(const BayesNetClassifier& net, const data::DiscreteDataset& d,
                                   std::span<const std::uint8_t> mask) {
  if (mask.size() != d.n * d.n_features)
    throw std::invalid_argument("classification_error_masked: mask shape");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < d.n; ++i) {
    Classification r =
        classify(net, d.row(i), mask.subspan(i * d.n_features, d.n_features));
    if (r.predicted != d.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(d.n);
}

}  // namespace quantbench::bnc
