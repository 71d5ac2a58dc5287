#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "brickshadows/pauli.hpp"
#include "brickshadows/rng.hpp"

namespace brickshadows {

// Packed two-qubit label: first qubit in the low bits.
inline int pack2(int l1, int l2) { return (l1 & 3) | ((l2 & 3) << 2); }
inline int unpack2_first(int m) { return m & 3; }
inline int unpack2_second(int m) { return (m >> 2) & 3; }

// Conjugation action of one enumerated gate: a signed permutation of labels.
struct Gate1 {
  std::array<uint8_t, 4> perm;
  std::array<int8_t, 4> sign;
  std::array<uint8_t, 4> inv_perm;
  std::array<int8_t, 4> inv_sign;
};

struct Gate2 {
  std::array<uint8_t, 16> perm;
  std::array<int8_t, 16> sign;
  std::array<uint8_t, 16> inv_perm;
  std::array<int8_t, 16> inv_sign;
};

// The single-qubit (24 element) and two-qubit (11520 element) Clifford groups,
// enumerated once by closing over generators and deduplicating on the tableau.
// Elements are addressed by index, which is how uniform gate draws happen.
class CliffordGroups {
 public:
  static const CliffordGroups& instance();

  int size1() const { return static_cast<int>(gates1_.size()); }
  int size2() const { return static_cast<int>(gates2_.size()); }
  const Gate1& gate1(int idx) const { return gates1_[idx]; }
  const Gate2& gate2(int idx) const { return gates2_[idx]; }

  // Dense unitaries (up to global phase), reconstructed from the generator
  // word recorded during enumeration. Test oracles only.
  Eigen::Matrix2cd dense1(int idx) const;
  Eigen::Matrix4cd dense2(int idx) const;

  // Uniform-conjugation Markov kernels, unsigned labels.
  // kernel1/kernel2: action on one Pauli. joint variants: simultaneous action
  // of the same gate on a pair of Paulis; joint_kernel2 is the 256x256 kernel
  // the pair-probability tensor network is built from.
  Eigen::MatrixXd kernel1() const;        // 4 x 4
  Eigen::MatrixXd kernel2() const;        // 16 x 16
  Eigen::MatrixXd joint_kernel1() const;  // 16 x 16
  Eigen::MatrixXd joint_kernel2() const;  // 256 x 256

 private:
  CliffordGroups();

  struct Word {
    int parent;
    int generator;  // -1 for the identity root
  };

  std::vector<Gate1> gates1_;
  std::vector<Word> words1_;
  std::vector<Gate2> gates2_;
  std::vector<Word> words2_;
};

// n-qubit Clifford as the images of X_q and Z_q under conjugation.
class CliffordTableau {
 public:
  static CliffordTableau identity(int n);

  int num_qubits() const { return n_; }
  const PauliString& x_image(int q) const { return x_img_[q]; }
  const PauliString& z_image(int q) const { return z_img_[q]; }
  PauliString& x_image(int q) { return x_img_[q]; }
  PauliString& z_image(int q) { return z_img_[q]; }

  PauliString conjugate(const PauliString& p) const;

  // Compose a local gate after this tableau (circuit order).
  void push_gate1(const Gate1& g, int q);
  void push_gate2(const Gate2& g, int q1, int q2);

  CliffordTableau then(const CliffordTableau& second) const;
  CliffordTableau inverse() const;

  // Symplectic condition plus Hermitian rows.
  bool is_valid() const;

 private:
  explicit CliffordTableau(int n);
  int n_ = 0;
  std::vector<PauliString> x_img_, z_img_;
};

// Exactly uniform over the full n-qubit Clifford group modulo global phase
// (uniform symplectic part via sequential symplectic-basis completion, then
// uniform signs). This is the depth = infinity measurement ensemble.
CliffordTableau random_clifford_tableau(int n, Rng& rng);

// Conjugate a signed Pauli by one enumerated gate, in place.
void apply_gate1_to_pauli(const Gate1& g, int q, PauliString& p, bool inverse = false);
void apply_gate2_to_pauli(const Gate2& g, int q1, int q2, PauliString& p, bool inverse = false);

}  // namespace brickshadows
