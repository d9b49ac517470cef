#pragma once

#include <cstdint>

#include "quantbench/data/dataset.hpp"

namespace quantbench::data {

/// Ground-truth generator for discrete benchmark tables: class-conditional
/// feature chain x_0 | c, x_i | c, x_{i-1}. The chain couples neighboring
/// features, so a naive-Bayes model of the data is deliberately
/// misspecified.
struct SyntheticSpec {
  std::size_t n = 1000;
  std::size_t n_features = 10;
  int cardinality = 3;
  int n_classes = 3;
  double strength = 1.5;  // logit spread of the random conditionals
  std::uint64_t seed = 1;
};

DiscreteDataset make_chain_dataset(const SyntheticSpec& spec);

}  // namespace quantbench::data
