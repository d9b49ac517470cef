#include "quantbench/data/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace quantbench::data {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

DiscreteDataset load_csv_dataset(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("csv: missing header");
  std::size_t n_cols = split_commas(line).size();
  if (n_cols < 2) throw std::runtime_error("csv: need at least one feature and a label");

  DiscreteDataset d;
  d.n_features = n_cols - 1;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_commas(line);
    if (cells.size() != n_cols)
      throw std::runtime_error("csv: row " + std::to_string(line_no) + " has wrong arity");
    for (std::size_t f = 0; f < d.n_features; ++f) {
      std::string cell = trim(cells[f]);
      if (cell == "?") {
        d.features.push_back(0);
        d.missing.resize(d.features.size(), 0);
        d.missing.back() = 1;
      } else {
        int v = std::stoi(cell);
        if (v < 0 || v > 255) throw std::runtime_error("csv: cell out of byte range");
        d.features.push_back(static_cast<std::uint8_t>(v));
        d.missing.resize(d.features.size(), 0);
      }
    }
    std::string lab = trim(cells.back());
    if (lab == "?") throw std::runtime_error("csv: missing label");
    d.labels.push_back(std::stoi(lab));
    ++d.n;
  }
  if (d.n == 0) throw std::runtime_error("csv: no data rows");

  d.cardinalities.assign(d.n_features, 1);
  for (std::size_t i = 0; i < d.n; ++i)
    for (std::size_t f = 0; f < d.n_features; ++f)
      if (!d.is_missing(i, f))
        d.cardinalities[f] = std::max(d.cardinalities[f], int(d.value(i, f)) + 1);
  d.n_classes = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
  if (!d.has_missing()) d.missing.clear();
  d.validate();
  return d;
}

DiscreteDataset load_csv_dataset_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("csv: cannot open " + path);
  return load_csv_dataset(f);
}

void save_csv_dataset(const DiscreteDataset& d, std::ostream& os) {
  for (std::size_t f = 0; f < d.n_features; ++f) os << "x" << f << ",";
  os << "label\n";
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t f = 0; f < d.n_features; ++f) {
      if (d.is_missing(i, f))
        os << "?,";
      else
        os << int(d.value(i, f)) << ",";
    }
    os << d.labels[i] << "\n";
  }
}

void save_csv_dataset_file(const DiscreteDataset& d, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("csv: cannot open " + path);
  save_csv_dataset(d, f);
}

}  // namespace quantbench::data
