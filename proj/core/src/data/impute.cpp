#include "quantbench/data/impute.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace quantbench::data {

DiscreteDataset knn_impute(const DiscreteDataset& query, const DiscreteDataset& reference,
                           int k) {
  if (reference.n == 0) throw std::invalid_argument("knn_impute: empty reference set");
  if (k < 1) throw std::invalid_argument("knn_impute: k must be >= 1");
  if (query.n_features != reference.n_features)
    throw std::invalid_argument("knn_impute: feature count mismatch");

  DiscreteDataset out = query;
  if (!out.has_missing()) {
    out.missing.clear();
    return out;
  }

  const std::size_t l = query.n_features;
  std::vector<std::size_t> order(reference.n);
  std::vector<int> dist(reference.n);

  for (std::size_t i = 0; i < query.n; ++i) {
    bool any = false;
    for (std::size_t f = 0; f < l && !any; ++f) any = query.is_missing(i, f);
    if (!any) continue;

    for (std::size_t r = 0; r < reference.n; ++r) {
      int d = 0;
      for (std::size_t f = 0; f < l; ++f)
        if (!query.is_missing(i, f) && !reference.is_missing(r, f) &&
            query.value(i, f) != reference.value(r, f))
          ++d;
      dist[r] = d;
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    for (std::size_t f = 0; f < l; ++f) {
      if (!query.is_missing(i, f)) continue;
      std::vector<int> votes(static_cast<std::size_t>(query.cardinalities[f]), 0);
      int used = 0;
      for (std::size_t r = 0; r < reference.n && used < k; ++r) {
        std::size_t ref = order[r];
        if (reference.is_missing(ref, f)) continue;
        ++votes[reference.value(ref, f)];
        ++used;
      }
      int best = 0;
      for (std::size_t v = 1; v < votes.size(); ++v)
        if (votes[v] > votes[best]) best = static_cast<int>(v);  // ties keep lowest value
      out.value(i, f) = static_cast<std::uint8_t>(best);
      out.missing[i * l + f] = 0;
    }
  }
  out.missing.clear();
  return out;
}

}  // namespace quantbench::data
