#include "quantbench/bitkernels/binary_gemm.hpp"

#include <bit>
#include <stdexcept>

namespace quantbench::bitkernels {

std::int64_t binary_dot(const BitMatrix& a, std::size_t row_a,
                        const BitMatrix& b, std::size_t row_b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("binary_dot: length mismatch");
  auto ra = a.row(row_a);
  auto rb = b.row(row_b);
  std::uint64_t mismatches = 0;
  for (std::size_t w = 0; w < ra.size(); ++w)
    mismatches += static_cast<std::uint64_t>(std::popcount(ra[w] ^ rb[w]));
  return static_cast<std::int64_t>(a.cols()) - 2 * static_cast<std::int64_t>(mismatches);
}

IntMatrix binary_gemm(const BitMatrix& a, const BitMatrix& b_t) {
  if (a.cols() != b_t.cols()) throw std::invalid_argument("binary_gemm: dimension mismatch");
  const std::size_t m = a.rows(), k = b_t.rows(), words = a.words_per_row();
  const auto n = static_cast<std::int64_t>(a.cols());
  IntMatrix out(m, k);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t* ra = a.row(i).data();
    std::int32_t* ci = out.row(i).data();
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint64_t* rb = b_t.row(j).data();
      std::uint64_t mismatches = 0;
      for (std::size_t w = 0; w < words; ++w)
        mismatches += static_cast<std::uint64_t>(std::popcount(ra[w] ^ rb[w]));
      ci[j] = static_cast<std::int32_t>(n - 2 * static_cast<std::int64_t>(mismatches));
    }
  }
  return out;
}

void sgemm_reference(const Matrix<float>& a, const Matrix<float>& b_t, Matrix<float>& c) {
  if (a.cols() != b_t.cols() || c.rows() != a.rows() || c.cols() != b_t.rows())
    throw std::invalid_argument("sgemm_reference: dimension mismatch");
  const std::size_t m = a.rows(), k = b_t.rows(), n = a.cols();
  for (std::size_t i = 0; i < m; ++i) {
    const float* ra = a.row(i).data();
    for (std::size_t j = 0; j < k; ++j) {
      const float* rb = b_t.row(j).data();
      float acc = 0.0f;
      for (std::size_t p = 0; p < n; ++p) acc += ra[p] * rb[p];
      c(i, j) = acc;
    }
  }
}

}  // namespace quantbench::bitkernels
