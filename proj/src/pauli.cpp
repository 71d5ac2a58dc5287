#include "brickshadows/pauli.hpp"

#include <stdexcept>

namespace brickshadows {

int pauli_product_phase(int a, int b) {
  // P^a = i^{xz} X^x Z^z. Multiplying and renormalizing to the Hermitian
  // convention of the product label gives
  //   c = x_a z_a + x_b z_b + 2 z_a x_b - (x_a^x_b)(z_a^z_b)  (mod 4).
  const int xa = pauli_x_bit(a), za = pauli_z_bit(a);
  const int xb = pauli_x_bit(b), zb = pauli_z_bit(b);
  int c = xa * za + xb * zb + 2 * za * xb - ((xa ^ xb) & 1) * ((za ^ zb) & 1);
  return ((c % 4) + 4) % 4;
}

char pauli_char(int g) {
  static const char chars[4] = {'I', 'Z', 'X', 'Y'};
  return chars[g & 3];
}

int pauli_label_from_char(char c) {
  switch (c) {
    case 'I': case 'i': return kPauliI;
    case 'Z': case 'z': return kPauliZ;
    case 'X': case 'x': return kPauliX;
    case 'Y': case 'y': return kPauliY;
    default: throw std::invalid_argument(std::string("not a Pauli letter: ") + c);
  }
}

PauliString PauliString::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty Pauli string");
  size_t start = 0;
  int phase = 0;
  if (text[0] == '+') {
    start = 1;
  } else if (text[0] == '-') {
    start = 1;
    phase = 2;
  }
  if (start == text.size()) throw std::invalid_argument("Pauli string has no letters");
  std::vector<uint8_t> labels;
  labels.reserve(text.size() - start);
  for (size_t i = start; i < text.size(); ++i) {
    labels.push_back(static_cast<uint8_t>(pauli_label_from_char(text[i])));
  }
  return PauliString(std::move(labels), phase);
}

int PauliString::sign() const {
  if (!is_hermitian()) throw std::logic_error("sign of a non-Hermitian Pauli");
  return phase_ == 0 ? 1 : -1;
}

bool PauliString::is_identity() const {
  for (uint8_t g : labels_)
    if (g != 0) return false;
  return true;
}

int PauliString::weight() const {
  int w = 0;
  for (uint8_t g : labels_) w += (g != 0);
  return w;
}

std::vector<uint8_t> PauliString::signature() const {
  std::vector<uint8_t> s(labels_.size());
  for (size_t i = 0; i < labels_.size(); ++i) s[i] = labels_[i] != 0;
  return s;
}

int PauliString::support_extent() const {
  int first = -1, last = -1;
  for (int q = 0; q < num_qubits(); ++q) {
    if (labels_[q] != 0) {
      if (first < 0) first = q;
      last = q;
    }
  }
  return first < 0 ? 0 : last - first + 1;
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (num_qubits() != other.num_qubits())
    throw std::invalid_argument("commutes_with: size mismatch");
  int sym = 0;
  for (int q = 0; q < num_qubits(); ++q) {
    const int a = labels_[q], b = other.labels_[q];
    sym ^= (pauli_x_bit(a) & pauli_z_bit(b)) ^ (pauli_z_bit(a) & pauli_x_bit(b));
  }
  return sym == 0;
}

bool PauliString::is_z_type() const {
  for (uint8_t g : labels_)
    if (pauli_x_bit(g)) return false;
  return true;
}

int PauliString::basis_expectation(const std::vector<uint8_t>& bits) const {
  if (static_cast<int>(bits.size()) != num_qubits())
    throw std::invalid_argument("basis_expectation: bit count mismatch");
  if (!is_z_type()) return 0;
  int s = sign();
  for (int q = 0; q < num_qubits(); ++q) {
    if (pauli_z_bit(labels_[q]) && bits[q]) s = -s;
  }
  return s;
}

PauliString PauliString::times(const PauliString& other) const {
  if (num_qubits() != other.num_qubits())
    throw std::invalid_argument("times: size mismatch");
  std::vector<uint8_t> out(labels_.size());
  int phase = phase_ + other.phase_;
  for (size_t q = 0; q < labels_.size(); ++q) {
    phase += pauli_product_phase(labels_[q], other.labels_[q]);
    out[q] = labels_[q] ^ other.labels_[q];
  }
  return PauliString(std::move(out), phase);
}

std::string PauliString::str() const {
  std::string s;
  switch (phase_) {
    case 0: s = "+"; break;
    case 1: s = "+i"; break;
    case 2: s = "-"; break;
    case 3: s = "-i"; break;
  }
  for (uint8_t g : labels_) s += pauli_char(g);
  return s;
}

uint64_t PauliString::label_key() const {
  if (labels_.size() > 32) throw std::length_error("label_key limited to 32 qubits");
  uint64_t key = 0;
  for (size_t q = 0; q < labels_.size(); ++q)
    key |= static_cast<uint64_t>(labels_[q]) << (2 * q);
  return key;
}

PauliString PauliString::from_label_key(uint64_t key, int n) {
  std::vector<uint8_t> labels(n);
  for (int q = 0; q < n; ++q) labels[q] = (key >> (2 * q)) & 3;
  return PauliString(std::move(labels), 0);
}

}  // namespace brickshadows
