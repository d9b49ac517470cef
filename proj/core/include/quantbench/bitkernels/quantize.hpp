#pragma once

#include <cstdint>
#include <vector>

#include "quantbench/bitkernels/bit_matrix.hpp"
#include "quantbench/bitkernels/quant_spec.hpp"
#include "quantbench/matrix.hpp"
#include "quantbench/rng.hpp"

namespace quantbench::bitkernels {

struct ScalarQuant {
  std::int64_t code = 0;  // integer code of the chosen grid point
  double value = 0.0;     // decoded value
  bool saturated = false; // clamped to the representable range
};

/// Quantizes one scalar to the grid described by `spec`.
/// fixed_point grids are code*scale with codes in the signed `bits` range;
/// reduced_float and pow2 ignore `scale`. Deterministic mode rounds to the
/// nearest representable value with ties away from zero; stochastic mode
/// picks the lower neighbor l with probability (u-x)/(u-l) so the decoded
/// expectation equals x. Out-of-range values saturate and set the flag.
/// ternary_symmetric needs matrix statistics and is rejected here.
ScalarQuant quantize_scalar(double x, const QuantSpec& spec, Rng* rng = nullptr,
                            double scale = 1.0);

/// Nearest representable reduced-float value of x (sign preserved,
/// m-bit mantissa fraction, e-bit exponent, exponent saturating at the top
/// and clamping at the bottom). Convenience wrapper over quantize_scalar.
double round_reduced_float(double x, int mantissa_bits, int exponent_bits);

enum class Granularity { per_matrix, per_row };

struct BinaryScaled {
  std::vector<double> alpha;  // size 1 (per_matrix) or rows (per_row)
  BitMatrix signs;
};

/// W ~= alpha * B with B = sign(W) and alpha = mean |W| over the granularity
/// unit, the l2-optimal scalar for a fixed sign pattern. All-zero input
/// yields alpha = 0 and B all +1.
BinaryScaled quantize_binary_scaled(const RealMatrix& w, Granularity g);

struct TernaryQuant {
  double scale = 0.0;      // a > 0
  double threshold = 0.0;  // delta
  Matrix<std::int8_t> t;   // {-1, 0, +1}
};

/// Symmetric ternary projection: delta = delta_factor * mean|W| (default
/// 0.7), T = sign(W) where |W| > delta, a = mean |W| over kept entries.
/// Throws when every entry falls below delta.
TernaryQuant quantize_ternary(const RealMatrix& w, double delta_factor = 0.7);

}  // namespace quantbench::bitkernels
