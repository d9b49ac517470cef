#pragma once

#include "quantbench/bitkernels/quant_spec.hpp"
#include "quantbench/bnc/cpt.hpp"

namespace quantbench::bnc {

/// Quantizes real_double log-parameters. reduced_float rounds each value to
/// the (m, e) grid with the sign fixed negative, exponent saturating at the
/// top and clamping at the bottom; fixed_point rounds log values to b-bit
/// integers with one global scale placing the most negative log at the
/// integer range edge. Other spec kinds are rejected.
CPTSet quantize_cpts(const CPTSet& real_cpts, const bitkernels::QuantSpec& spec);

}  // namespace quantbench::bnc
