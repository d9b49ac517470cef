#include "quantbench/bitkernels/fixed_tensor.hpp"

#include <bit>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace quantbench::bitkernels {

int signed_width(std::int64_t v) {
  std::uint64_t mag = v >= 0 ? static_cast<std::uint64_t>(v)
                             : static_cast<std::uint64_t>(~v);  // -v-1
  return std::bit_width(mag) + 1;
}

void FixedTensor::validate() const {
  if (bits < 1 || bits > 32) throw std::invalid_argument("FixedTensor: bits out of [1,32]");
  if (values.size() != rows * cols)
    throw std::invalid_argument("FixedTensor: shape/value count mismatch");
  const std::int64_t lo = -(std::int64_t{1} << (bits - 1));
  const std::int64_t hi = (std::int64_t{1} << (bits - 1)) - 1;
  for (std::int64_t v : values)
    if (v < lo || v > hi)
      throw std::invalid_argument("FixedTensor: value " + std::to_string(v) +
                                  " exceeds " + std::to_string(bits) + " bits");
}

FixedTensor fixed_gemm(const FixedTensor& a, const FixedTensor& b) {
  a.validate();
  b.validate();
  if (a.cols != b.rows) throw std::invalid_argument("fixed_gemm: dimension mismatch");
  const int log2n = a.cols <= 1 ? 0 : std::bit_width(a.cols - 1);
  if (a.bits + b.bits + log2n > 64)
    throw std::invalid_argument("fixed_gemm: accumulator width precondition violated");

  FixedTensor c;
  c.rows = a.rows;
  c.cols = b.cols;
  c.scale = a.scale * b.scale;
  c.values.assign(c.rows * c.cols, 0);

  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t p = 0; p < a.cols; ++p) {
      const std::int64_t av = a.at(i, p);
      if (av == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += av * b.at(p, j);
    }

  int width = 1;
  for (std::int64_t v : c.values) width = std::max(width, signed_width(v));
  c.bits = width;
  return c;
}

}  // namespace quantbench::bitkernels
