#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "quantbench/matrix.hpp"

namespace quantbench::bitkernels {

/// Row-major sign matrix packed 64 signs per word.
/// Bit b of word w in row r encodes the sign of element (r, 64*w + b),
/// bit=1 <=> +1, bit=0 <=> -1. Padding bits (column index >= cols) are
/// always 0; every kernel relies on that.
class BitMatrix {
 public:
  static constexpr std::size_t kWordBits = 64;

  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows),
        cols_(cols),
        words_per_row_((cols + kWordBits - 1) / kWordBits),
        data_(rows * words_per_row_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_per_row_; }

  std::span<const std::uint64_t> row(std::size_t r) const {
    return {data_.data() + r * words_per_row_, words_per_row_};
  }
  std::span<std::uint64_t> row(std::size_t r) {
    return {data_.data() + r * words_per_row_, words_per_row_};
  }

  bool bit(std::size_t r, std::size_t c) const {
    return (data_[r * words_per_row_ + c / kWordBits] >> (c % kWordBits)) & 1u;
  }
  void set_bit(std::size_t r, std::size_t c, bool positive) {
    std::uint64_t& w = data_[r * words_per_row_ + c / kWordBits];
    std::uint64_t mask = std::uint64_t{1} << (c % kWordBits);
    if (positive)
      w |= mask;
    else
      w &= ~mask;
  }

  int sign_at(std::size_t r, std::size_t c) const { return bit(r, c) ? +1 : -1; }

  /// Negates all signs of a row, keeping padding bits 0.
  void negate_row(std::size_t r);

  bool padding_clear() const;

  /// Bytes occupied by the packed words (headers excluded).
  std::size_t payload_bytes() const { return data_.size() * sizeof(std::uint64_t); }

  std::span<const std::uint64_t> words() const { return data_; }

  friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0, words_per_row_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Packs a real vector into a 1-row BitMatrix: bit i = 1 iff v[i] >= 0
/// (sign(0) is +1 throughout this project).
BitMatrix pack_signs(std::span<const double> v);

/// Packs every row of a real matrix.
BitMatrix pack_sign_matrix(const RealMatrix& m);

/// Unpacks row r into +-1 values.
std::vector<double> unpack_signs(const BitMatrix& m, std::size_t r = 0);

/// Serialization: magic "QBM1", rows and cols as little-endian u64, then
/// the packed words little-endian. Byte-exact round-trip.
void save_bitmatrix(const BitMatrix& m, std::ostream& os);
BitMatrix load_bitmatrix(std::istream& is);
void save_bitmatrix_file(const BitMatrix& m, const std::string& path);
BitMatrix load_bitmatrix_file(const std::string& path);

}  // namespace quantbench::bitkernels
