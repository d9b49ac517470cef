#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "quantbench/data/dataset.hpp"
#include "quantbench/data/idx.hpp"

namespace quantbench::data {

/// 2x2 mean pooling of an image stack [n, h, w] -> [n, h/2, w/2], rounded to
/// the nearest integer gray value (half rounds up: 127.5 -> 128).
IdxTensor downsample2x(const IdxTensor& images);

/// Uniform-width binning of [0,255] into `levels` bins: floor(v*levels/256).
std::vector<std::uint8_t> discretize(std::span<const std::uint8_t> values, int levels);

/// Independent per-cell missing mask with P(missing) = rate, deterministic
/// per seed. Returned mask has n*l entries.
std::vector<std::uint8_t> mar_mask(std::size_t n, std::size_t l, double rate,
                                   std::uint64_t seed);

/// Builds a DiscreteDataset from discretized images + labels.
DiscreteDataset make_discrete_dataset(const IdxTensor& images, std::span<const std::uint8_t> labels,
                                      int levels, int n_classes);

}  // namespace quantbench::data
