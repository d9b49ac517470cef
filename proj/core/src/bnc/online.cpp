#include "quantbench/bnc/online.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace quantbench::bnc {

RatioLogTable::RatioLogTable() : values_(kEntries, 0.0) {
  std::vector<char> seen(kEntries, 0);
  // first q hitting a bucket is its lower bound, the stored representative
  for (std::uint64_t q = 1; q <= (std::uint64_t{1} << kRatioBits); ++q) {
    std::size_t idx = index_of(q, std::uint64_t{1} << kRatioBits);
    if (!seen[idx]) {
      seen[idx] = 1;
      values_[idx] = std::log(std::ldexp(static_cast<double>(q), -kRatioBits));
    }
  }
}

std::size_t RatioLogTable::index_of(std::uint64_t num, std::uint64_t den) {
  if (den == 0 || num > den) throw std::invalid_argument("RatioLogTable: need num <= den");
  std::uint64_t q = (num << kRatioBits) / den;
  if (q == 0) q = 1;  // ratios below 2^-kRatioBits share the smallest bucket
  const int bw = std::bit_width(q);
  const int m = kMantissaBits;
  std::uint64_t frac = bw > m + 1 ? (q >> (bw - 1 - m)) & ((1u << m) - 1)
                                  : (q << (m + 1 - bw)) & ((1u << m) - 1);
  return static_cast<std::size_t>(bw - 1) * (std::size_t{1} << m) + frac;
}

const RatioLogTable& RatioLogTable::shared() {
  static RatioLogTable table;
  return table;
}

OnlineRpState::OnlineRpState(const Structure& s, OnlineRpConfig cfg)
    : structure_(s), cfg_(cfg) {
  structure_.validate();
  if (cfg_.counter_bits < 2 || cfg_.counter_bits > 31)
    throw std::invalid_argument("online: counter width out of [2,31]");
  counter_max_ = (std::uint32_t{1} << cfg_.counter_bits) - 1;

  CPTSet shapes = make_cpt_shapes(structure_);
  for (const auto& t : shapes.tables) {
    TableState ts;
    ts.rows = t.rows;
    ts.cols = t.cols;
    ts.counts.assign(t.rows * t.cols, 0);
    ts.totals.assign(t.rows, 0);
    tables_.push_back(std::move(ts));
  }
}

void OnlineRpState::bump(std::size_t table, std::size_t row, std::size_t value) {
  TableState& t = tables_[table];
  std::uint32_t& cell = t.counts[row * t.cols + value];
  if (cell >= counter_max_) {
    // scale the whole table down, keeping nonzero cells alive
    for (auto& c : t.counts)
      if (c > 0) c = std::max<std::uint32_t>(1, c >> 1);
    for (std::size_t r = 0; r < t.rows; ++r) {
      std::uint32_t total = 0;
      for (std::size_t v = 0; v < t.cols; ++v) total += t.counts[r * t.cols + v];
      t.totals[r] = total;
    }
    ++overflows_;
  }
  ++cell;
  ++t.totals[row];
}

void OnlineRpState::update(std::span<const std::uint8_t> instance, int label) {
  const Structure& s = structure_;
  if (instance.size() != static_cast<std::size_t>(s.n_features))
    throw std::invalid_argument("online: instance arity mismatch");
  if (label < 0 || label >= s.n_classes) throw std::invalid_argument("online: label range");

  bump(0, 0, static_cast<std::size_t>(label));
  for (int f = 0; f < s.n_features; ++f) {
    int p = s.feature_parent[f];
    std::size_t rows_per_class = p >= 0 ? static_cast<std::size_t>(s.cardinalities[p]) : 1;
    std::size_t u = p >= 0 ? instance[static_cast<std::size_t>(p)] : 0;
    bump(static_cast<std::size_t>(f) + 1,
         static_cast<std::size_t>(label) * rows_per_class + u,
         instance[static_cast<std::size_t>(f)]);
  }
}

double OnlineRpState::log_param(std::size_t table, std::size_t row, std::size_t value) const {
  const TableState& t = tables_[table];
  std::uint64_t num = t.counts[row * t.cols + value] + std::uint64_t{1};
  std::uint64_t den = t.totals[row] + static_cast<std::uint64_t>(t.cols);
  return RatioLogTable::shared().log_ratio(num, den);
}

std::uint32_t OnlineRpState::count(std::size_t table, std::size_t row, std::size_t value) const {
  const TableState& t = tables_[table];
  return t.counts[row * t.cols + value];
}

std::uint32_t OnlineRpState::row_total(std::size_t table, std::size_t row) const {
  return tables_[table].totals[row];
}

BayesNetClassifier OnlineRpState::snapshot() const {
  BayesNetClassifier net;
  net.structure = structure_;
  net.cpts = make_cpt_shapes(structure_);
  for (std::size_t t = 0; t < tables_.size(); ++t) {
    auto& table = net.cpts.tables[t];
    for (std::size_t r = 0; r < table.rows; ++r)
      for (std::size_t v = 0; v < table.cols; ++v) table.log_at(r, v) = log_param(t, r, v);
  }
  return net;
}

}  // namespace quantbench::bnc
