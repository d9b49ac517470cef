#include "quantbench/bitkernels/quantize.hpp"

#include <cmath>
#include <stdexcept>

namespace quantbench::bitkernels {

void QuantSpec::validate() const {
  switch (kind) {
    case QuantKind::fixed_point:
      if (bits < 1 || bits > 32) throw std::invalid_argument("QuantSpec: bits out of [1,32]");
      break;
    case QuantKind::reduced_float:
      if (mantissa_bits < 1) throw std::invalid_argument("QuantSpec: mantissa_bits < 1");
      if (exponent_bits < 1) throw std::invalid_argument("QuantSpec: exponent_bits < 1");
      break;
    default:
      break;
  }
}

const char* to_string(QuantKind k) {
  switch (k) {
    case QuantKind::binary_scaled: return "binary_scaled";
    case QuantKind::ternary_symmetric: return "ternary_symmetric";
    case QuantKind::fixed_point: return "fixed_point";
    case QuantKind::reduced_float: return "reduced_float";
    case QuantKind::pow2: return "pow2";
  }
  return "?";
}

std::string QuantSpec::describe() const {
  std::string s = to_string(kind);
  if (kind == QuantKind::fixed_point) s += "(" + std::to_string(bits) + ")";
  if (kind == QuantKind::reduced_float)
    s += "(" + std::to_string(mantissa_bits) + "," + std::to_string(exponent_bits) + ")";
  if (rounding == Rounding::stochastic) s += "/stochastic";
  return s;
}

namespace {

// Picks between bracketing grid neighbors lo <= x <= hi.
double pick_neighbor(double x, double lo, double hi, Rounding mode, Rng* rng) {
  if (lo == hi || x == lo) return lo;
  if (x == hi) return hi;
  if (mode == Rounding::stochastic) {
    if (!rng) throw std::invalid_argument("quantize: stochastic mode needs rng");
    double p_upper = (x - lo) / (hi - lo);
    return rng->next_double() < p_upper ? hi : lo;
  }
  double mid = lo + (hi - lo) / 2;
  if (x > mid) return hi;
  if (x < mid) return lo;
  // tie: away from zero
  return std::fabs(hi) > std::fabs(lo) ? hi : lo;
}

ScalarQuant quantize_fixed(double x, const QuantSpec& spec, Rng* rng, double scale) {
  if (scale <= 0) throw std::invalid_argument("quantize: scale must be positive");
  const auto hi_code = static_cast<double>((std::int64_t{1} << (spec.bits - 1)) - 1);
  const auto lo_code = static_cast<double>(-(std::int64_t{1} << (spec.bits - 1)));
  double g = x / scale;
  ScalarQuant q;
  if (g >= hi_code) {
    q.code = static_cast<std::int64_t>(hi_code);
    q.saturated = g > hi_code;
  } else if (g <= lo_code) {
    q.code = static_cast<std::int64_t>(lo_code);
    q.saturated = g < lo_code;
  } else {
    double lo = std::floor(g);
    double chosen = pick_neighbor(g, lo, lo + 1, spec.rounding, rng);
    q.code = static_cast<std::int64_t>(chosen);
  }
  q.value = static_cast<double>(q.code) * scale;
  return q;
}

struct RfLayout {
  int emin, emax;
};

RfLayout rf_layout(const QuantSpec& spec) {
  int half = spec.exponent_bits >= 31 ? (1 << 29) : (1 << (spec.exponent_bits - 1));
  return {-(half - 1), half - 1};
}

std::int64_t rf_code(bool negative, int e, std::int64_t frac, const QuantSpec& spec) {
  std::int64_t field = e - rf_layout(spec).emin + 1;  // 0 reserved for zero
  std::int64_t mag = (field << spec.mantissa_bits) | frac;
  return negative ? -mag : mag;
}

ScalarQuant quantize_rf(double x, const QuantSpec& spec, Rng* rng) {
  ScalarQuant q;
  if (x == 0.0) return q;
  const auto [emin, emax] = rf_layout(spec);
  const int m = spec.mantissa_bits;
  const double max_frac = static_cast<double>((std::int64_t{1} << m) - 1);
  const double max_mag = (2.0 - std::ldexp(1.0, -m)) * std::ldexp(1.0, emax);
  const bool neg = x < 0;
  double mag = std::fabs(x);

  if (mag >= max_mag) {
    q.code = rf_code(neg, emax, static_cast<std::int64_t>(max_frac), spec);
    q.value = neg ? -max_mag : max_mag;
    q.saturated = mag > max_mag;
    return q;
  }

  int exp2;
  std::frexp(mag, &exp2);
  int e = exp2 - 1;  // mag = s * 2^e with s in [1,2)
  if (e < emin) e = emin;  // exponent underflow clamps at the bottom

  double unit = std::ldexp(1.0, e);
  double f = (mag / unit - 1.0) * std::ldexp(1.0, m);  // may be < 0 after clamping
  double flo = std::max(0.0, std::floor(f));
  double fhi = std::min(std::ceil(std::max(f, 0.0)), max_frac + 1);
  double lo = (1.0 + flo * std::ldexp(1.0, -m)) * unit;
  double hi = (1.0 + fhi * std::ldexp(1.0, -m)) * unit;  // fhi == 2^m carries into 2^(e+1)
  double clamped = std::max(mag, lo);
  double chosen = pick_neighbor(clamped, lo, hi, spec.rounding, rng);

  if (chosen == hi && fhi > max_frac) {
    ++e;
    f = 0;
  } else {
    f = chosen == hi ? fhi : flo;
  }
  q.code = rf_code(neg, e, static_cast<std::int64_t>(f), spec);
  double val = (1.0 + f * std::ldexp(1.0, -m)) * std::ldexp(1.0, e);
  q.value = neg ? -val : val;
  return q;
}

ScalarQuant quantize_pow2(double x, const QuantSpec& spec, Rng* rng) {
  ScalarQuant q;
  if (x == 0.0) return q;
  const bool neg = x < 0;
  double mag = std::fabs(x);
  int exp2;
  std::frexp(mag, &exp2);
  int e = exp2 - 1;
  double lo = std::ldexp(1.0, e);
  double chosen = pick_neighbor(mag, lo, 2 * lo, spec.rounding, rng);
  q.code = chosen == lo ? e : e + 1;
  q.value = neg ? -chosen : chosen;
  return q;
}

}  // namespace

ScalarQuant quantize_scalar(double x, const QuantSpec& spec, Rng* rng, double scale) {
  spec.validate();
  if (!std::isfinite(x)) throw std::invalid_argument("quantize: non-finite input");
  switch (spec.kind) {
    case QuantKind::fixed_point:
      return quantize_fixed(x, spec, rng, scale);
    case QuantKind::reduced_float:
      return quantize_rf(x, spec, rng);
    case QuantKind::pow2:
      return quantize_pow2(x, spec, rng);
    case QuantKind::binary_scaled: {
      ScalarQuant q;
      q.code = x >= 0 ? 1 : -1;
      q.value = static_cast<double>(q.code);
      return q;
    }
    case QuantKind::ternary_symmetric:
      throw std::invalid_argument("quantize_scalar: ternary needs matrix statistics");
  }
  throw std::invalid_argument("quantize_scalar: unknown kind");
}

double round_reduced_float(double x, int mantissa_bits, int exponent_bits) {
  return quantize_scalar(x, QuantSpec::reduced(mantissa_bits, exponent_bits)).value;
}

BinaryScaled quantize_binary_scaled(const RealMatrix& w, Granularity g) {
  if (w.empty()) throw std::invalid_argument("quantize_binary_scaled: empty matrix");
  BinaryScaled out;
  out.signs = pack_sign_matrix(w);
  if (g == Granularity::per_matrix) {
    double sum = 0;
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (double v : w.row(r)) sum += std::fabs(v);
    out.alpha.push_back(sum / static_cast<double>(w.size()));
  } else {
    out.alpha.resize(w.rows());
    for (std::size_t r = 0; r < w.rows(); ++r) {
      double sum = 0;
      for (double v : w.row(r)) sum += std::fabs(v);
      out.alpha[r] = sum / static_cast<double>(w.cols());
    }
  }
  return out;
}

TernaryQuant quantize_ternary(const RealMatrix& w, double delta_factor) {
  if (w.empty()) throw std::invalid_argument("quantize_ternary: empty matrix");
  double mean_abs = 0;
  for (std::size_t r = 0; r < w.rows(); ++r)
    for (double v : w.row(r)) mean_abs += std::fabs(v);
  mean_abs /= static_cast<double>(w.size());

  TernaryQuant out;
  out.threshold = delta_factor * mean_abs;
  out.t = Matrix<std::int8_t>(w.rows(), w.cols(), 0);
  double kept_sum = 0;
  std::size_t kept = 0;
  for (std::size_t r = 0; r < w.rows(); ++r)
    for (std::size_t c = 0; c < w.cols(); ++c) {
      double v = w(r, c);
      if (std::fabs(v) > out.threshold) {
        out.t(r, c) = v >= 0 ? 1 : -1;
        kept_sum += std::fabs(v);
        ++kept;
      }
    }
  if (kept == 0) throw std::runtime_error("degenerate ternary quantization");
  out.scale = kept_sum / static_cast<double>(kept);
  return out;
}

}  // namespace quantbench::bitkernels
