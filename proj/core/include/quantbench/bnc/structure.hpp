#pragma once

#include <vector>

#include "quantbench/data/dataset.hpp"

namespace quantbench::bnc {

/// Class-rooted directed structure: the class is a parent of every feature
/// and each feature has at most one feature parent, so the feature-parent
/// graph is a forest (empty for naive Bayes, a tree for TAN).
struct Structure {
  int n_features = 0;
  int n_classes = 0;
  std::vector<int> cardinalities;   // per feature
  std::vector<int> feature_parent;  // -1 = class only

  bool is_naive_bayes() const;
  std::vector<std::vector<int>> children() const;
  /// Parents before children; roots in index order.
  std::vector<int> topo_order() const;

  /// Forest/cycle/cardinality checks; throws on violation.
  void validate() const;

  friend bool operator==(const Structure&, const Structure&) = default;
};

Structure learn_structure_nb(int n_features, std::vector<int> cardinalities, int n_classes);

/// TAN structure via conditional mutual information I(X_i; X_j | C) from
/// smoothed empirical counts, maximum spanning tree (ties broken by
/// lexicographic edge order), rooted at the lowest-indexed feature with
/// edges directed outward. Degenerates to NB below two features.
Structure learn_structure_tan(const data::DiscreteDataset& d, double smoothing = 1.0);

/// The edge weight used by learn_structure_tan, exposed for verification.
double conditional_mutual_information(const data::DiscreteDataset& d, std::size_t i,
                                      std::size_t j, double smoothing = 1.0);

}  // namespace quantbench::bnc
