#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "quantbench/bnc/cpt.hpp"

namespace quantbench::bnc {

struct Classification {
  int predicted = -1;
  std::vector<double> scores;           // per-class log p(c, x_o)
  std::vector<std::int64_t> int_scores; // set on the integer path only
  bool integer_path = false;
};

/// Classifies one instance. Fully observed fixed_point parameters score by
/// pure integer addition of the stored codes; anything else sums real
/// (decoded) log-probabilities. Missing features: naive Bayes omits their
/// factors, TAN eliminates them exactly by sum-product over the feature
/// tree. Argmax ties break toward the lower class id.
Classification classify(const BayesNetClassifier& net, std::span<const std::uint8_t> instance,
                        std::span<const std::uint8_t> missing_mask = {});

/// Fraction of misclassified instances (uses each row's mask when present).
double classification_error(const BayesNetClassifier& net, const data::DiscreteDataset& d);

/// As above but with an explicit missing mask applied to every instance.
double classification_error_masked(const BayesNetClassifier& net, const data::DiscreteDataset& d,
                                   std::span<const std::uint8_t> mask);

}  // namespace quantbench::bnc
