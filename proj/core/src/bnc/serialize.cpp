#include "quantbench/bnc/serialize.hpp"

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace quantbench::bnc {

namespace {

// Little-endian bit stream, LSB first within each byte.
class BitWriter {
 public:
  explicit BitWriter(std::ostream& os) : os_(os) {}
  void put(std::uint64_t value, int bits) {
    for (int i = 0; i < bits; ++i) {
      buffer_ |= ((value >> i) & 1u) << fill_;
      if (++fill_ == 8) flush_byte();
    }
  }
  void finish() {
    if (fill_ > 0) flush_byte();
  }

 private:
  void flush_byte() {
    os_.put(static_cast<char>(buffer_));
    buffer_ = 0;
    fill_ = 0;
  }
  std::ostream& os_;
  unsigned buffer_ = 0;
  int fill_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::istream& is) : is_(is) {}
  std::uint64_t get(int bits) {
    std::uint64_t v = 0;
    for (int i = 0; i < bits; ++i) {
      if (fill_ == 0) {
        int c = is_.get();
        if (c == EOF) throw std::runtime_error("bnc payload: truncated");
        buffer_ = static_cast<unsigned>(c);
        fill_ = 8;
      }
      v |= static_cast<std::uint64_t>(buffer_ & 1u) << i;
      buffer_ >>= 1;
      --fill_;
    }
    return v;
  }

 private:
  std::istream& is_;
  unsigned buffer_ = 0;
  int fill_ = 0;
};

std::int64_t sign_extend(std::uint64_t v, int bits) {
  if (bits >= 64) return static_cast<std::int64_t>(v);
  std::uint64_t m = std::uint64_t{1} << (bits - 1);
  return static_cast<std::int64_t>((v ^ m) - m);
}

const char* repr_name(CptRepr r) {
  switch (r) {
    case CptRepr::real_double: return "real_double";
    case CptRepr::reduced_float: return "reduced_float";
    case CptRepr::fixed_point: return "fixed_point";
  }
  return "?";
}

}  // namespace

std::size_t payload_bits(const BayesNetClassifier& net) {
  return net.cpts.payload_bits();
}

void write_manifest(const BayesNetClassifier& net, std::ostream& os) {
  const Structure& s = net.structure;
  os << "quantbench-bnc 1\n";
  os << "classes " << s.n_classes << "\n";
  os << "features " << s.n_features << "\n";
  os << "cardinalities";
  for (int c : s.cardinalities) os << " " << c;
  os << "\nparents";
  for (int p : s.feature_parent) os << " " << p;
  os << "\nrepresentation " << repr_name(net.cpts.repr);
  if (net.cpts.repr == CptRepr::fixed_point)
    os << " " << net.cpts.spec.bits << " " << std::hexfloat << net.cpts.fixed_scale
       << std::defaultfloat;
  if (net.cpts.repr == CptRepr::reduced_float)
    os << " " << net.cpts.spec.mantissa_bits << " " << net.cpts.spec.exponent_bits;
  os << "\ngamma " << std::hexfloat << net.gamma << std::defaultfloat << "\n";
  os << "payload_bits " << payload_bits(net) << "\n";
}

void write_payload(const BayesNetClassifier& net, std::ostream& os) {
  BitWriter w(os);
  const int bits = net.cpts.bits_per_entry();
  for (const auto& t : net.cpts.tables) {
    if (net.cpts.repr == CptRepr::real_double) {
      for (double v : t.logp) w.put(std::bit_cast<std::uint64_t>(v), 64);
    } else {
      for (std::int64_t c : t.codes) w.put(static_cast<std::uint64_t>(c), bits);
    }
  }
  w.finish();
}

void save_classifier(const BayesNetClassifier& net, const std::string& stem) {
  std::ofstream mf(stem + ".bnc");
  if (!mf) throw std::runtime_error("bnc: cannot open " + stem + ".bnc");
  write_manifest(net, mf);
  std::ofstream pf(stem + ".cpt", std::ios::binary);
  if (!pf) throw std::runtime_error("bnc: cannot open " + stem + ".cpt");
  write_payload(net, pf);
}

BayesNetClassifier load_classifier(const std::string& stem) {
  std::ifstream mf(stem + ".bnc");
  if (!mf) throw std::runtime_error("bnc: cannot open " + stem + ".bnc");

  std::string tag;
  int version;
  mf >> tag >> version;
  if (tag != "quantbench-bnc" || version != 1) throw std::runtime_error("bnc: bad manifest");

  BayesNetClassifier net;
  Structure& s = net.structure;
  std::string key;
  std::size_t expect_bits = 0;
  while (mf >> key) {
    if (key == "classes") {
      mf >> s.n_classes;
    } else if (key == "features") {
      mf >> s.n_features;
      s.cardinalities.resize(static_cast<std::size_t>(s.n_features));
      s.feature_parent.resize(static_cast<std::size_t>(s.n_features));
    } else if (key == "cardinalities") {
      for (auto& c : s.cardinalities) mf >> c;
    } else if (key == "parents") {
      for (auto& p : s.feature_parent) mf >> p;
    } else if (key == "representation") {
      std::string name;
      mf >> name;
      if (name == "real_double") {
        net.cpts.repr = CptRepr::real_double;
      } else if (name == "fixed_point") {
        net.cpts.repr = CptRepr::fixed_point;
        net.cpts.spec.kind = bitkernels::QuantKind::fixed_point;
        std::string scale_tok;
        mf >> net.cpts.spec.bits >> scale_tok;
        net.cpts.fixed_scale = std::strtod(scale_tok.c_str(), nullptr);
      } else if (name == "reduced_float") {
        net.cpts.repr = CptRepr::reduced_float;
        net.cpts.spec.kind = bitkernels::QuantKind::reduced_float;
        mf >> net.cpts.spec.mantissa_bits >> net.cpts.spec.exponent_bits;
      } else {
        throw std::runtime_error("bnc: unknown representation " + name);
      }
    } else if (key == "gamma") {
      std::string tok;
      mf >> tok;
      net.gamma = std::strtod(tok.c_str(), nullptr);
    } else if (key == "payload_bits") {
      mf >> expect_bits;
    } else {
      throw std::runtime_error("bnc: unknown manifest key " + key);
    }
  }
  s.validate();

  CPTSet shapes = make_cpt_shapes(s);
  net.cpts.tables.clear();
  for (auto& t : shapes.tables) {
    if (net.cpts.repr != CptRepr::real_double) {
      t.codes.resize(t.rows * t.cols);
      t.logp.clear();
    }
    net.cpts.tables.push_back(std::move(t));
  }
  if (expect_bits && expect_bits != net.cpts.payload_bits())
    throw std::runtime_error("bnc: manifest/shape payload size mismatch");

  std::ifstream pf(stem + ".cpt", std::ios::binary);
  if (!pf) throw std::runtime_error("bnc: cannot open " + stem + ".cpt");
  BitReader r(pf);
  const int bits = net.cpts.bits_per_entry();
  for (auto& t : net.cpts.tables) {
    if (net.cpts.repr == CptRepr::real_double) {
      for (auto& v : t.logp) v = std::bit_cast<double>(r.get(64));
    } else {
      for (auto& c : t.codes) c = sign_extend(r.get(bits), bits);
    }
  }
  return net;
}

}  // namespace quantbench::bnc
