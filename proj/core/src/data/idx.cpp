#include "quantbench/data/idx.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace quantbench::data {

namespace {

std::uint32_t get_u32_be(std::span<const std::uint8_t> bytes, std::size_t off) {
  return (std::uint32_t{bytes[off]} << 24) | (std::uint32_t{bytes[off + 1]} << 16) |
         (std::uint32_t{bytes[off + 2]} << 8) | std::uint32_t{bytes[off + 3]};
}

}  // namespace

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw std::runtime_error("idx: truncated header");
  std::uint32_t magic = get_u32_be(bytes, 0);
  std::size_t ndims;
  if (magic == 0x00000801u)
    ndims = 1;
  else if (magic == 0x00000803u)
    ndims = 3;
  else
    throw std::runtime_error("idx: bad magic");

  if (bytes.size() < 4 + 4 * ndims) throw std::runtime_error("idx: truncated dimensions");
  IdxTensor t;
  std::size_t total = 1;
  for (std::size_t d = 0; d < ndims; ++d) {
    std::size_t dim = get_u32_be(bytes, 4 + 4 * d);
    t.dims.push_back(dim);
    total *= dim;
  }
  std::size_t payload_off = 4 + 4 * ndims;
  if (bytes.size() != payload_off + total) throw std::runtime_error("idx: payload length mismatch");
  t.values.assign(bytes.begin() + static_cast<std::ptrdiff_t>(payload_off), bytes.end());
  return t;
}

IdxTensor load_idx_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("idx: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return parse_idx(bytes);
}

std::string dataset_root() {
  if (const char* env = std::getenv("QUANTBENCH_DATA")) return env;
  return "datasets";
}

}  // namespace quantbench::data
