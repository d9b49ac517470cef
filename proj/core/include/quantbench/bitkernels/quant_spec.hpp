#pragma once

#include <cstdint>
#include <string>

namespace quantbench::bitkernels {

enum class QuantKind {
  binary_scaled,     // W = alpha * B, B in {-1,+1}
  ternary_symmetric, // {-a, 0, +a}
  fixed_point,       // signed integers times a scale
  reduced_float,     // sign, m-bit mantissa fraction, e-bit exponent
  pow2,              // signed powers of two
};

enum class Rounding { deterministic_nearest, stochastic };

/// Description of a numeric format plus its rounding mode.
struct QuantSpec {
  QuantKind kind = QuantKind::fixed_point;
  Rounding rounding = Rounding::deterministic_nearest;
  int bits = 8;           // fixed_point: 1..32
  int mantissa_bits = 4;  // reduced_float: >= 1
  int exponent_bits = 5;  // reduced_float: >= 1
  std::uint64_t seed = 0; // consumed only when rounding == stochastic

  static QuantSpec binary() { return {QuantKind::binary_scaled, Rounding::deterministic_nearest, 1, 1, 1, 0}; }
  static QuantSpec ternary() { return {QuantKind::ternary_symmetric, Rounding::deterministic_nearest, 2, 1, 1, 0}; }
  static QuantSpec fixed(int bits, Rounding r = Rounding::deterministic_nearest) {
    QuantSpec s;
    s.kind = QuantKind::fixed_point;
    s.bits = bits;
    s.rounding = r;
    return s;
  }
  static QuantSpec reduced(int mantissa, int exponent) {
    QuantSpec s;
    s.kind = QuantKind::reduced_float;
    s.mantissa_bits = mantissa;
    s.exponent_bits = exponent;
    return s;
  }

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;

  std::string describe() const;
};

const char* to_string(QuantKind k);

}  // namespace quantbench::bitkernels
