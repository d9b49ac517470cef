#pragma once

#include <cstdint>
#include <vector>

#include "quantbench/matrix.hpp"

namespace quantbench::bitkernels {

/// 2-D tensor of integers with a declared signed bit width and a real scale:
/// value_real = value_int * scale.
struct FixedTensor {
  std::size_t rows = 0, cols = 0;
  std::vector<std::int64_t> values;  // row-major
  int bits = 0;                      // every value fits signed `bits`
  double scale = 1.0;

  std::int64_t at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::int64_t& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double real_at(std::size_t r, std::size_t c) const {
    return static_cast<double>(at(r, c)) * scale;
  }

  /// Throws std::invalid_argument when a value exceeds the declared width.
  void validate() const;
};

/// Minimal signed width holding v.
int signed_width(std::int64_t v);

/// Exact integer GEMM: C (m x k) = A (m x n) * B (n x k).
/// Requires A.bits + B.bits + ceil(log2 n) <= 64 so the 64-bit accumulator
/// cannot overflow; violations throw before any arithmetic happens.
/// Result scale = A.scale * B.scale; result bits = minimal width of the
/// largest accumulated magnitude.
FixedTensor fixed_gemm(const FixedTensor& a, const FixedTensor& b);

}  // namespace quantbench::bitkernels
