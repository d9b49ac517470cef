#include "quantbench/bnc/cpt.hpp"

#include <stdexcept>

namespace quantbench::bnc {

double CPTSet::entry(std::size_t table, std::size_t row, std::size_t value) const {
  const CptTable& t = tables[table];
  switch (repr) {
    case CptRepr::real_double:
      return t.log_at(row, value);
    case CptRepr::fixed_point:
      ++decode_calls_;
      return static_cast<double>(t.code_at(row, value)) * fixed_scale;
    case CptRepr::reduced_float: {
      ++decode_calls_;
      // code packs (exponent field << m) | fraction, negated log magnitude
      std::int64_t code = t.code_at(row, value);
      if (code == 0) return 0.0;
      const int m = spec.mantissa_bits;
      std::int64_t mag = code < 0 ? -code : code;
      std::int64_t field = mag >> m;
      std::int64_t frac = mag & ((std::int64_t{1} << m) - 1);
      int emin = -((1 << (spec.exponent_bits - 1)) - 1);
      int e = static_cast<int>(field) + emin - 1;
      double v = (1.0 + static_cast<double>(frac) * std::ldexp(1.0, -m)) * std::ldexp(1.0, e);
      return code < 0 ? -v : v;
    }
  }
  throw std::logic_error("cpt: unknown representation");
}

std::size_t CPTSet::n_entries() const {
  std::size_t n = 0;
  for (const auto& t : tables) n += t.rows * t.cols;
  return n;
}

int CPTSet::bits_per_entry() const {
  switch (repr) {
    case CptRepr::real_double:
      return 64;
    case CptRepr::fixed_point:
      return spec.bits;
    case CptRepr::reduced_float:
      return 1 + spec.exponent_bits + spec.mantissa_bits;
  }
  return 0;
}

CPTSet make_cpt_shapes(const Structure& s) {
  s.validate();
  CPTSet c;
  CptTable prior;
  prior.rows = 1;
  prior.cols = static_cast<std::size_t>(s.n_classes);
  prior.logp.assign(prior.cols, 0.0);
  c.tables.push_back(std::move(prior));
  for (int f = 0; f < s.n_features; ++f) {
    CptTable t;
    int p = s.feature_parent[f];
    t.rows = static_cast<std::size_t>(s.n_classes) *
             (p >= 0 ? static_cast<std::size_t>(s.cardinalities[p]) : 1);
    t.cols = static_cast<std::size_t>(s.cardinalities[f]);
    t.logp.assign(t.rows * t.cols, 0.0);
    c.tables.push_back(std::move(t));
  }
  return c;
}

}  // namespace quantbench::bnc
