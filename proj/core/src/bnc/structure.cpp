#include "quantbench/bnc/structure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace quantbench::bnc {

bool Structure::is_naive_bayes() const {
  return std::all_of(feature_parent.begin(), feature_parent.end(),
                     [](int p) { return p < 0; });
}

std::vector<std::vector<int>> Structure::children() const {
  std::vector<std::vector<int>> ch(static_cast<std::size_t>(n_features));
  for (int f = 0; f < n_features; ++f)
    if (feature_parent[f] >= 0) ch[feature_parent[f]].push_back(f);
  return ch;
}

std::vector<int> Structure::topo_order() const {
  auto ch = children();
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n_features));
  std::vector<int> stack;
  for (int f = 0; f < n_features; ++f)
    if (feature_parent[f] < 0) stack.push_back(f);
  // roots in index order, children depth-first
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty()) {
    int f = stack.back();
    stack.pop_back();
    order.push_back(f);
    for (auto it = ch[f].rbegin(); it != ch[f].rend(); ++it) stack.push_back(*it);
  }
  if (order.size() != static_cast<std::size_t>(n_features))
    throw std::logic_error("structure: feature-parent graph has a cycle");
  return order;
}

void Structure::validate() const {
  if (n_features < 0 || n_classes < 2) throw std::invalid_argument("structure: bad sizes");
  if (cardinalities.size() != static_cast<std::size_t>(n_features) ||
      feature_parent.size() != static_cast<std::size_t>(n_features))
    throw std::invalid_argument("structure: field sizes");
  for (int card : cardinalities)
    if (card < 1) throw std::invalid_argument("structure: cardinality < 1");
  for (int p : feature_parent)
    if (p < -1 || p >= n_features) throw std::invalid_argument("structure: parent out of range");
  (void)topo_order();  // throws on cycles
}

Structure learn_structure_nb(int n_features, std::vector<int> cardinalities, int n_classes) {
  if (n_features < 1) throw std::invalid_argument("learn_structure_nb: need features");
  Structure s;
  s.n_features = n_features;
  s.n_classes = n_classes;
  s.cardinalities = std::move(cardinalities);
  s.feature_parent.assign(static_cast<std::size_t>(n_features), -1);
  s.validate();
  return s;
}

double conditional_mutual_information(const data::DiscreteDataset& d, std::size_t i,
                                      std::size_t j, double smoothing) {
  const int ci = d.cardinalities[i], cj = d.cardinalities[j], nc = d.n_classes;
  std::vector<double> joint(static_cast<std::size_t>(nc) * ci * cj, smoothing);
  for (std::size_t s = 0; s < d.n; ++s) {
    std::size_t idx = (static_cast<std::size_t>(d.labels[s]) * ci + d.value(s, i)) * cj +
                      d.value(s, j);
    joint[idx] += 1.0;
  }
  double total = static_cast<double>(d.n) + smoothing * joint.size();

  double cmi = 0;
  for (int c = 0; c < nc; ++c) {
    double pc = 0;
    std::vector<double> pi(static_cast<std::size_t>(ci), 0.0), pj(static_cast<std::size_t>(cj), 0.0);
    for (int u = 0; u < ci; ++u)
      for (int v = 0; v < cj; ++v) {
        double p = joint[(static_cast<std::size_t>(c) * ci + u) * cj + v] / total;
        pc += p;
        pi[u] += p;
        pj[v] += p;
      }
    for (int u = 0; u < ci; ++u)
      for (int v = 0; v < cj; ++v) {
        double p = joint[(static_cast<std::size_t>(c) * ci + u) * cj + v] / total;
        cmi += p * std::log(p * pc / (pi[u] * pj[v]));
      }
  }
  return cmi;
}

Structure learn_structure_tan(const data::DiscreteDataset& d, double smoothing) {
  if (d.has_missing())
    throw std::invalid_argument("learn_structure_tan: needs fully observed data");
  const auto l = d.n_features;
  if (l < 2) return learn_structure_nb(static_cast<int>(l), d.cardinalities, d.n_classes);

  struct Edge {
    double w;
    std::size_t i, j;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i + 1; j < l; ++j)
      edges.push_back({conditional_mutual_information(d, i, j, smoothing), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(b.w, a.i, a.j) < std::tie(a.w, b.i, b.j);  // weight desc, then lexicographic
  });

  // Kruskal
  std::vector<std::size_t> parent(l);
  for (std::size_t i = 0; i < l; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<std::size_t>> adj(l);
  std::size_t taken = 0;
  for (const Edge& e : edges) {
    auto a = find(e.i), b = find(e.j);
    if (a == b) continue;
    parent[a] = b;
    adj[e.i].push_back(e.j);
    adj[e.j].push_back(e.i);
    if (++taken == l - 1) break;
  }

  // Direct edges outward from feature 0.
  Structure s;
  s.n_features = static_cast<int>(l);
  s.n_classes = d.n_classes;
  s.cardinalities = d.cardinalities;
  s.feature_parent.assign(l, -1);
  std::vector<char> seen(l, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    std::size_t f = stack.back();
    stack.pop_back();
    for (std::size_t g : adj[f])
      if (!seen[g]) {
        seen[g] = 1;
        s.feature_parent[g] = static_cast<int>(f);
        stack.push_back(g);
      }
  }
  s.validate();
  return s;
}

}  // namespace quantbench::bnc
