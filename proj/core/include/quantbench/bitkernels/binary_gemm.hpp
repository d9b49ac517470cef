#pragma once

#include <cstdint>

#include "quantbench/bitkernels/bit_matrix.hpp"
#include "quantbench/matrix.hpp"

namespace quantbench::bitkernels {

/// +-1 dot product of two packed rows of identical logical length n,
/// computed as n - 2*popcount(xor). With 0-padded rows the xor form counts
/// exactly the mismatching logical positions, so this equals the textbook
/// xnor+popcount expression on the n logical bits while staying pad-safe.
std::int64_t binary_dot(const BitMatrix& a, std::size_t row_a,
                        const BitMatrix& b, std::size_t row_b);

/// out[i][j] = binary_dot(A row i, B row j). B is the transposed right
/// operand stored row-major, so the inner loop streams packed rows of both.
IntMatrix binary_gemm(const BitMatrix& a, const BitMatrix& b_t);

/// Naive single-precision GEMM, the in-repo float32 reference the binary
/// kernel is benchmarked against. C (m x k) = A (m x n) * B^T (k x n).
void sgemm_reference(const Matrix<float>& a, const Matrix<float>& b_t, Matrix<float>& c);

}  // namespace quantbench::bitkernels
