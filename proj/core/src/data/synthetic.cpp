#include "quantbench/data/synthetic.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "quantbench/rng.hpp"

namespace quantbench::data {

namespace {

// Random categorical distribution from uniform logits.
std::vector<double> random_dist(Rng& rng, int card, double strength) {
  std::vector<double> p(static_cast<std::size_t>(card));
  double z = 0;
  for (auto& v : p) {
    v = std::exp(rng.uniform(-strength, strength));
    z += v;
  }
  for (auto& v : p) v /= z;
  return p;
}

int sample_dist(Rng& rng, const std::vector<double>& p) {
  double u = rng.next_double();
  double acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace

DiscreteDataset make_chain_dataset(const SyntheticSpec& spec) {
  if (spec.n_features < 1 || spec.n_classes < 2 || spec.cardinality < 2)
    throw std::invalid_argument("make_chain_dataset: bad spec");
  Rng rng(spec.seed);

  const int c = spec.n_classes, k = spec.cardinality;
  const std::size_t l = spec.n_features;

  // p(x_0 | c) and p(x_i | c, x_{i-1})
  std::vector<std::vector<double>> first(static_cast<std::size_t>(c));
  for (auto& d : first) d = random_dist(rng, k, spec.strength);
  std::vector<std::vector<std::vector<double>>> chain(l);
  for (std::size_t f = 1; f < l; ++f) {
    chain[f].resize(static_cast<std::size_t>(c) * k);
    for (auto& d : chain[f]) d = random_dist(rng, k, spec.strength);
  }

  DiscreteDataset ds;
  ds.n = spec.n;
  ds.n_features = l;
  ds.n_classes = c;
  ds.cardinalities.assign(l, k);
  ds.features.resize(spec.n * l);
  ds.labels.resize(spec.n);

  for (std::size_t i = 0; i < spec.n; ++i) {
    int label = static_cast<int>(rng.below(static_cast<std::uint64_t>(c)));
    ds.labels[i] = label;
    int prev = sample_dist(rng, first[label]);
    ds.features[i * l] = static_cast<std::uint8_t>(prev);
    for (std::size_t f = 1; f < l; ++f) {
      prev = sample_dist(rng, chain[f][static_cast<std::size_t>(label) * k + prev]);
      ds.features[i * l + f] = static_cast<std::uint8_t>(prev);
    }
  }
  return ds;
}

}  // namespace quantbench::data
