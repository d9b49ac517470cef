#pragma once

#include <iosfwd>
#include <string>

#include "quantbench/bnc/cpt.hpp"

namespace quantbench::bnc {

/// Classifier files: a text manifest "<stem>.bnc" (structure, cardinalities,
/// representation, gamma) plus a binary payload "<stem>.cpt" holding the
/// parameter codes little-endian, bit-packed at bits_per_entry() bits each.
void save_classifier(const BayesNetClassifier& net, const std::string& stem);
BayesNetClassifier load_classifier(const std::string& stem);

void write_manifest(const BayesNetClassifier& net, std::ostream& os);
void write_payload(const BayesNetClassifier& net, std::ostream& os);

/// Payload size in bits (codes only, matching the manifest's kbits line).
std::size_t payload_bits(const BayesNetClassifier& net);

}  // namespace quantbench::bnc
