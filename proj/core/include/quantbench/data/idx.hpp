#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace quantbench::data {

/// Raw unsigned-byte tensor from an IDX container.
struct IdxTensor {
  std::vector<std::size_t> dims;
  std::vector<std::uint8_t> values;

  std::size_t count() const { return dims.empty() ? 0 : dims[0]; }
};

/// Parses big-endian IDX bytes. Accepts magic 0x00000801 (label vectors)
/// and 0x00000803 (image stacks); rejects anything malformed or truncated.
IdxTensor parse_idx(std::span<const std::uint8_t> bytes);

IdxTensor load_idx_file(const std::string& path);

/// Dataset root: $QUANTBENCH_DATA if set, else "datasets".
std::string dataset_root();

}  // namespace quantbench::data
