#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace quantbench::data {

/// Instances of categorical features with a per-cell missing mask.
struct DiscreteDataset {
  std::size_t n = 0;          // instances
  std::size_t n_features = 0; // L
  int n_classes = 0;
  std::vector<std::uint8_t> features;  // n x L, row-major
  std::vector<int> cardinalities;      // per feature
  std::vector<int> labels;             // in [0, n_classes)
  std::vector<std::uint8_t> missing;   // n x L, 1 = missing; empty means none

  std::uint8_t value(std::size_t i, std::size_t f) const { return features[i * n_features + f]; }
  std::uint8_t& value(std::size_t i, std::size_t f) { return features[i * n_features + f]; }
  bool is_missing(std::size_t i, std::size_t f) const {
    return !missing.empty() && missing[i * n_features + f] != 0;
  }
  std::span<const std::uint8_t> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }
  std::span<const std::uint8_t> mask_row(std::size_t i) const {
    if (missing.empty()) return {};
    return {missing.data() + i * n_features, n_features};
  }
  bool has_missing() const;

  /// Checks value/cardinality and label/class consistency; throws on violation.
  void validate() const;
};

/// Keeps only features whose value varies across the dataset. Returns the
/// surviving original feature indices.
std::vector<std::size_t> remove_constant_features(DiscreteDataset& d);

}  // namespace quantbench::data
