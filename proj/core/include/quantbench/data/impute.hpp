#pragma once

#include "quantbench/data/dataset.hpp"

namespace quantbench::data {

/// Fills every missing cell with the majority value of that cell among the
/// k nearest reference instances, nearest under Hamming distance over cells
/// observed on both sides. Distance ties keep the lower reference index;
/// majority ties pick the lowest value.
DiscreteDataset knn_impute(const DiscreteDataset& query, const DiscreteDataset& reference,
                           int k = 5);

}  // namespace quantbench::data
