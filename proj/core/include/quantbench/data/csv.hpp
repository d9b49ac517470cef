#pragma once

#include <iosfwd>
#include <string>

#include "quantbench/data/dataset.hpp"

namespace quantbench::data {

/// CSV table format: header row, integer cells, `?` for a missing cell,
/// last column is the class label (never missing).
DiscreteDataset load_csv_dataset(std::istream& is);
DiscreteDataset load_csv_dataset_file(const std::string& path);

void save_csv_dataset(const DiscreteDataset& d, std::ostream& os);
void save_csv_dataset_file(const DiscreteDataset& d, const std::string& path);

}  // namespace quantbench::data
