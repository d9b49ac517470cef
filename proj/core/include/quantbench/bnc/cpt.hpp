#pragma once

#include <cstdint>
#include <vector>

#include "quantbench/bitkernels/quant_spec.hpp"
#include "quantbench/bnc/structure.hpp"

namespace quantbench::bnc {

enum class CptRepr { real_double, reduced_float, fixed_point };

/// One conditional table: rows = parent configurations, cols = node values.
/// Table 0 of a CPTSet is the class prior (one row); table i+1 belongs to
/// feature i with rows indexed c * parent_cardinality + parent_value (or
/// just c when the feature has no feature parent).
struct CptTable {
  std::size_t rows = 0, cols = 0;
  std::vector<double> logp;          // real_double
  std::vector<std::int64_t> codes;   // quantized

  double& log_at(std::size_t r, std::size_t v) { return logp[r * cols + v]; }
  double log_at(std::size_t r, std::size_t v) const { return logp[r * cols + v]; }
  std::int64_t code_at(std::size_t r, std::size_t v) const { return codes[r * cols + v]; }
};

/// Log-domain conditional probability tables in real or quantized form.
/// Quantized tables keep the rounded codes; the conditional rows are
/// deliberately NOT renormalized after quantization, classification sums
/// the stored values as-is.
struct CPTSet {
  CptRepr repr = CptRepr::real_double;
  std::vector<CptTable> tables;  // [0] = class prior, [i+1] = feature i

  // quantized representations
  bitkernels::QuantSpec spec{};  // reduced_float parameters
  double fixed_scale = 0.0;      // fixed_point decode: code * fixed_scale

  /// Log-probability of one entry; decodes quantized storage (and counts
  /// the decode so tests can assert the integer path never decodes).
  double entry(std::size_t table, std::size_t row, std::size_t value) const;
  std::int64_t decode_count() const { return decode_calls_; }
  void reset_decode_count() const { decode_calls_ = 0; }

  std::size_t n_entries() const;
  /// Bits of one stored code (8*sizeof(double) for real tables).
  int bits_per_entry() const;
  /// Total payload bits of the serialized parameters.
  std::size_t payload_bits() const { return n_entries() * bits_per_entry(); }

 private:
  mutable std::int64_t decode_calls_ = 0;
};

/// Table shapes implied by a structure, log-probabilities unset.
CPTSet make_cpt_shapes(const Structure& s);

/// A classifier is a structure plus its parameters; gamma records the MM
/// margin cap when the parameters were margin-trained.
struct BayesNetClassifier {
  Structure structure;
  CPTSet cpts;
  double gamma = 0.0;
};

}  // namespace quantbench::bnc
