#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "quantbench/bnc/cpt.hpp"

namespace quantbench::bnc {

/// Precomputed table of log((count+1)/(total+card)) values indexed through
/// the integer ratio q = ((count+1) << kRatioBits) / (total+card), which is
/// floor-quantized to an exponent/mantissa bucket. Index derivation uses
/// integer arithmetic only and is monotone in the ratio.
class RatioLogTable {
 public:
  static constexpr int kRatioBits = 14;     // ratios resolved down to 2^-14
  static constexpr int kMantissaBits = 6;   // 64 buckets per octave
  static constexpr std::size_t kEntries = 1024;

  RatioLogTable();

  /// Bucket of (num / den), num <= den required.
  static std::size_t index_of(std::uint64_t num, std::uint64_t den);

  double value(std::size_t idx) const { return values_[idx]; }
  double log_ratio(std::uint64_t num, std::uint64_t den) const {
    return values_[index_of(num, den)];
  }

  static const RatioLogTable& shared();

 private:
  std::vector<double> values_;
};

struct OnlineRpConfig {
  int counter_bits = 16;  // width of the per-cell counters
};

/// Online reduced-precision parameter learning: integer counters per CPT
/// cell, halving a whole table on counter overflow (floor 1 for nonzero),
/// log-parameters read from the shared ratio table. The update path never
/// touches floating point.
class OnlineRpState {
 public:
  OnlineRpState(const Structure& s, OnlineRpConfig cfg = {});

  void update(std::span<const std::uint8_t> instance, int label);

  /// log p(value | parent config) for a feature table (or the prior when
  /// table == 0), read through the lookup table.
  double log_param(std::size_t table, std::size_t row, std::size_t value) const;

  std::uint32_t count(std::size_t table, std::size_t row, std::size_t value) const;
  std::uint32_t row_total(std::size_t table, std::size_t row) const;
  std::uint64_t overflow_events() const { return overflows_; }

  /// Materializes a real_double classifier whose entries equal log_param.
  BayesNetClassifier snapshot() const;

  const Structure& structure() const { return structure_; }

 private:
  struct TableState {
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint32_t> counts;
    std::vector<std::uint32_t> totals;
  };

  void bump(std::size_t table, std::size_t row, std::size_t value);

  Structure structure_;
  OnlineRpConfig cfg_;
  std::uint32_t counter_max_;
  std::vector<TableState> tables_;
  std::uint64_t overflows_ = 0;
};

}  // namespace quantbench::bnc
