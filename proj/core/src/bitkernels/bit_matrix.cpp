#include "quantbench/bitkernels/bit_matrix.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace quantbench::bitkernels {

namespace {

std::uint64_t tail_mask(std::size_t cols) {
  std::size_t rem = cols % BitMatrix::kWordBits;
  return rem == 0 ? ~std::uint64_t{0} : ((std::uint64_t{1} << rem) - 1);
}

void put_u64_le(std::ostream& os, std::uint64_t v) {
  std::array<unsigned char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64_le(std::istream& is) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), 8);
  if (!is) throw std::runtime_error("bitmatrix: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

}  // namespace

void BitMatrix::negate_row(std::size_t r) {
  auto row_span = row(r);
  for (auto& w : row_span) w = ~w;
  if (!row_span.empty()) row_span.back() &= tail_mask(cols_);
}

bool BitMatrix::padding_clear() const {
  if (cols_ % kWordBits == 0 || rows_ == 0) return true;
  std::uint64_t mask = tail_mask(cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    if (row(r).back() & ~mask) return false;
  return true;
}

BitMatrix pack_signs(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("pack_signs: empty vector");
  BitMatrix m(1, v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] >= 0.0) m.set_bit(0, i, true);
  return m;
}

BitMatrix pack_sign_matrix(const RealMatrix& src) {
  if (src.empty()) throw std::invalid_argument("pack_sign_matrix: empty matrix");
  BitMatrix m(src.rows(), src.cols());
  for (std::size_t r = 0; r < src.rows(); ++r)
    for (std::size_t c = 0; c < src.cols(); ++c)
      if (src(r, c) >= 0.0) m.set_bit(r, c, true);
  return m;
}

std::vector<double> unpack_signs(const BitMatrix& m, std::size_t r) {
  std::vector<double> v(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) v[c] = m.bit(r, c) ? 1.0 : -1.0;
  return v;
}

void save_bitmatrix(const BitMatrix& m, std::ostream& os) {
  os.write("QBM1", 4);
  put_u64_le(os, m.rows());
  put_u64_le(os, m.cols());
  for (std::uint64_t w : m.words()) put_u64_le(os, w);
  if (!os) throw std::runtime_error("bitmatrix: write failed");
}

BitMatrix load_bitmatrix(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "QBM1", 4) != 0)
    throw std::runtime_error("bitmatrix: bad magic");
  std::uint64_t rows = get_u64_le(is);
  std::uint64_t cols = get_u64_le(is);
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (auto& w : m.row(r)) w = get_u64_le(is);
  if (!m.padding_clear()) throw std::runtime_error("bitmatrix: nonzero padding bits");
  return m;
}

void save_bitmatrix_file(const BitMatrix& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("bitmatrix: cannot open " + path);
  save_bitmatrix(m, f);
}

BitMatrix load_bitmatrix_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("bitmatrix: cannot open " + path);
  return load_bitmatrix(f);
}

}  // namespace quantbench::bitkernels
