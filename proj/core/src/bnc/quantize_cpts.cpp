#include "quantbench/bnc/quantize_cpts.hpp"

#include <cmath>
#include <stdexcept>

#include "quantbench/bitkernels/quantize.hpp"
#include "quantbench/rng.hpp"

namespace quantbench::bnc {

using bitkernels::QuantKind;
using bitkernels::QuantSpec;
using bitkernels::Rounding;

CPTSet quantize_cpts(const CPTSet& real_cpts, const QuantSpec& spec) {
  spec.validate();
  if (real_cpts.repr != CptRepr::real_double)
    throw std::invalid_argument("quantize_cpts: input must be real_double");
  if (spec.kind != QuantKind::reduced_float && spec.kind != QuantKind::fixed_point)
    throw std::invalid_argument("quantize_cpts: spec must be reduced_float or fixed_point");

  double scale = 1.0;
  if (spec.kind == QuantKind::fixed_point) {
    double most_negative = 0;
    for (const auto& t : real_cpts.tables)
      for (double v : t.logp) most_negative = std::min(most_negative, v);
    // most negative log maps to the bottom edge of the signed range
    scale = most_negative < 0
                ? -most_negative / static_cast<double>(std::int64_t{1} << (spec.bits - 1))
                : 1.0;
  }

  Rng rng(spec.seed);
  Rng* rng_p = spec.rounding == Rounding::stochastic ? &rng : nullptr;

  CPTSet out;
  out.repr = spec.kind == QuantKind::fixed_point ? CptRepr::fixed_point : CptRepr::reduced_float;
  out.spec = spec;
  out.fixed_scale = scale;
  out.tables.reserve(real_cpts.tables.size());
  for (const auto& t : real_cpts.tables) {
    CptTable q;
    q.rows = t.rows;
    q.cols = t.cols;
    q.codes.resize(t.rows * t.cols);
    for (std::size_t i = 0; i < t.logp.size(); ++i)
      q.codes[i] = bitkernels::quantize_scalar(t.logp[i], spec, rng_p, scale).code;
    out.tables.push_back(std::move(q));
  }
  return out;
}

}  // namespace quantbench::bnc
