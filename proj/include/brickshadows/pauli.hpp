#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace brickshadows {

// Single-qubit Pauli label: two bits (x, z) packed as g = 2x + z.
// 0 = I, 1 = Z, 2 = X, 3 = Y. The operator behind label g is the Hermitian
// i^{xz} X^x Z^z, so label 3 really is Y and every label squares to I.
inline constexpr int kPauliI = 0;
inline constexpr int kPauliZ = 1;
inline constexpr int kPauliX = 2;
inline constexpr int kPauliY = 3;

inline int pauli_x_bit(int g) { return (g >> 1) & 1; }
inline int pauli_z_bit(int g) { return g & 1; }
inline int pauli_label(int x, int z) { return ((x & 1) << 1) | (z & 1); }

// Exponent c of P^a P^b = i^c P^(a xor b) for single-qubit labels, c mod 4.
int pauli_product_phase(int a, int b);

char pauli_char(int g);
int pauli_label_from_char(char c);

// An n-qubit signed Pauli string. `phase` is the exponent of i in front of
// the product of per-qubit Hermitian factors; Hermitian strings have phase
// 0 or 2 (sign +1 / -1). Non-Hermitian intermediates (phase 1 or 3) appear
// only transiently inside multiplications.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n) : labels_(n, 0), phase_(0) {}
  PauliString(std::vector<uint8_t> labels, int phase)
      : labels_(std::move(labels)), phase_(phase & 3) {}

  // Text form: optional +/- sign then one of IXYZ per qubit, e.g. "-XYZZ".
  static PauliString parse(const std::string& text);

  int num_qubits() const { return static_cast<int>(labels_.size()); }
  int label(int q) const { return labels_[q]; }
  void set_label(int q, int g) { labels_[q] = static_cast<uint8_t>(g); }
  int phase() const { return phase_; }
  void set_phase(int p) { phase_ = p & 3; }

  bool is_hermitian() const { return (phase_ & 1) == 0; }
  // +1 or -1; requires Hermitian.
  int sign() const;
  bool is_identity() const;

  int weight() const;
  // OR of the x and z bits per qubit.
  std::vector<uint8_t> signature() const;
  // Largest (cyclic-agnostic, plain positional) distance between the first and
  // last supported qubit, plus one; 0 for identity. Used by the stat-mech bound.
  int support_extent() const;

  bool commutes_with(const PauliString& other) const;

  // True when the unsigned part lies in {I, Z}^n.
  bool is_z_type() const;
  // <b|P|b> for a computational basis state; 0 unless z-type, else the sign.
  int basis_expectation(const std::vector<uint8_t>& bits) const;

  // this * other with full i-power bookkeeping.
  PauliString times(const PauliString& other) const;

  bool equals_up_to_sign(const PauliString& other) const { return labels_ == other.labels_; }
  bool operator==(const PauliString& other) const {
    return labels_ == other.labels_ && phase_ == other.phase_;
  }

  std::string str() const;

  // Pack the labels little-endian, 2 bits per qubit (n <= 32).
  uint64_t label_key() const;
  static PauliString from_label_key(uint64_t key, int n);

 private:
  std::vector<uint8_t> labels_;
  int phase_ = 0;
};

}  // namespace brickshadows
