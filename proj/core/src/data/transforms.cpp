#include "quantbench/data/transforms.hpp"

#include <stdexcept>

#include "quantbench/rng.hpp"

namespace quantbench::data {

bool DiscreteDataset::has_missing() const {
  for (std::uint8_t m : missing)
    if (m) return true;
  return false;
}

void DiscreteDataset::validate() const {
  if (features.size() != n * n_features) throw std::invalid_argument("dataset: feature shape");
  if (labels.size() != n) throw std::invalid_argument("dataset: label count");
  if (cardinalities.size() != n_features) throw std::invalid_argument("dataset: cardinalities");
  if (!missing.empty() && missing.size() != n * n_features)
    throw std::invalid_argument("dataset: mask shape");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) throw std::invalid_argument("dataset: label range");
    for (std::size_t f = 0; f < n_features; ++f)
      if (!is_missing(i, f) && value(i, f) >= cardinalities[f])
        throw std::invalid_argument("dataset: value exceeds cardinality");
  }
}

std::vector<std::size_t> remove_constant_features(DiscreteDataset& d) {
  std::vector<std::size_t> kept;
  for (std::size_t f = 0; f < d.n_features; ++f) {
    bool varies = false;
    for (std::size_t i = 1; i < d.n && !varies; ++i)
      varies = d.value(i, f) != d.value(0, f);
    if (varies) kept.push_back(f);
  }
  if (kept.size() == d.n_features) return kept;

  DiscreteDataset out;
  out.n = d.n;
  out.n_features = kept.size();
  out.n_classes = d.n_classes;
  out.labels = d.labels;
  out.features.resize(out.n * out.n_features);
  out.cardinalities.resize(out.n_features);
  for (std::size_t j = 0; j < kept.size(); ++j) out.cardinalities[j] = d.cardinalities[kept[j]];
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t j = 0; j < kept.size(); ++j)
      out.features[i * out.n_features + j] = d.value(i, kept[j]);
  if (!d.missing.empty()) {
    out.missing.resize(out.n * out.n_features);
    for (std::size_t i = 0; i < d.n; ++i)
      for (std::size_t j = 0; j < kept.size(); ++j)
        out.missing[i * out.n_features + j] = d.missing[i * d.n_features + kept[j]];
  }
  d = std::move(out);
  return kept;
}

IdxTensor downsample2x(const IdxTensor& images) {
  if (images.dims.size() != 3) throw std::invalid_argument("downsample2x: need [n,h,w]");
  std::size_t n = images.dims[0], h = images.dims[1], w = images.dims[2];
  if (h % 2 != 0 || w % 2 != 0) throw std::invalid_argument("downsample2x: odd dimensions");

  IdxTensor out;
  out.dims = {n, h / 2, w / 2};
  out.values.resize(n * (h / 2) * (w / 2));
  for (std::size_t img = 0; img < n; ++img) {
    const std::uint8_t* src = images.values.data() + img * h * w;
    std::uint8_t* dst = out.values.data() + img * (h / 2) * (w / 2);
    for (std::size_t r = 0; r < h / 2; ++r)
      for (std::size_t c = 0; c < w / 2; ++c) {
        unsigned sum = src[(2 * r) * w + 2 * c] + src[(2 * r) * w + 2 * c + 1] +
                       src[(2 * r + 1) * w + 2 * c] + src[(2 * r + 1) * w + 2 * c + 1];
        dst[r * (w / 2) + c] = static_cast<std::uint8_t>((sum + 2) / 4);  // half rounds up
      }
  }
  return out;
}

std::vector<std::uint8_t> discretize(std::span<const std::uint8_t> values, int levels) {
  if (levels < 2) throw std::invalid_argument("discretize: levels must be >= 2");
  std::vector<std::uint8_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = static_cast<std::uint8_t>(values[i] * levels / 256);
  return out;
}

std::vector<std::uint8_t> mar_mask(std::size_t n, std::size_t l, double rate,
                                   std::uint64_t seed) {
  if (rate < 0 || rate > 1) throw std::invalid_argument("mar_mask: rate out of [0,1]");
  Rng rng(seed);
  std::vector<std::uint8_t> mask(n * l, 0);
  for (auto& cell : mask) cell = rng.next_double() < rate ? 1 : 0;
  return mask;
}

DiscreteDataset make_discrete_dataset(const IdxTensor& images, std::span<const std::uint8_t> labels,
                                      int levels, int n_classes) {
  if (images.count() != labels.size())
    throw std::invalid_argument("make_discrete_dataset: image/label count mismatch");
  DiscreteDataset d;
  d.n = images.count();
  d.n_features = images.values.size() / std::max<std::size_t>(1, d.n);
  d.n_classes = n_classes;
  d.features = discretize(images.values, levels);
  d.cardinalities.assign(d.n_features, levels);
  d.labels.assign(labels.begin(), labels.end());
  return d;
}

}  // namespace quantbench::data
