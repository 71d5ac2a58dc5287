#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "brickshadows/mps.hpp"
#include "brickshadows/pauli.hpp"

namespace brickshadows {

// Largest depth for which the pair-probability MPS is built (bond 16^{d-1}).
inline constexpr int kMaxTauDepth = 3;

// 4x4 kernel on pair support indicators: indices pack the two wires of a gate
// as first*2+second. Columns with equal input OR coincide because a gate sees
// its input pair only through joint triviality. Derived from the enumerated
// two-qubit Clifford group.
Eigen::MatrixXd signature_gate_kernel();

// terminal weight per wire indicator: chance that a scrambled non-identity
// factor reads out as Z
Eigen::Vector2d signature_terminal();

// 256x256 kernel for the joint walk of two Pauli labels through one two-qubit
// gate, in per-qubit layout: a qubit carries m = 4*g + g' for labels (g, g') of
// the two tracked Paulis, and the matrix index packs a gate's qubits as
// m_first*16 + m_second. Cached on disk under BRICKSHADOWS_CACHE_DIR.
const Eigen::MatrixXd& pair_gate_kernel();

// 16x16 single-qubit analogue (used by the depth-0 case and as a test oracle)
Eigen::MatrixXd pair_site_kernel();

// acceptance vector on a qubit's joint label: 1 when both tracked labels have
// no X component
Eigen::VectorXd pair_terminal();

// per-pair support indicators of a Pauli, length n/2
std::vector<uint8_t> pair_signature(const PauliString& p);

// Dense tensor for one brickwork unit cell, generic over the wire state space.
// Physical index packs the time-zero states of the cell's own two wires as
// first*w + second; row/column bond indices hold the left/right boundary
// wire's states after layers 1..d-1 (layer 1 least significant digit).
SiteTensor build_brickwork_cell(int d, int w, const Eigen::MatrixXd& kernel,
                                const Eigen::VectorXd& terminal);

class EigenvalueMPS {
 public:
  EigenvalueMPS() = default;
  EigenvalueMPS(int n, int d, PeriodicMPS inner);

  int num_qubits() const { return n_; }
  int depth() const { return d_; }
  const PeriodicMPS& inner() const { return inner_; }

  double value_on_signature(const std::vector<uint8_t>& h) const;
  double value(const PauliString& p) const;

 private:
  int n_ = 0;
  int d_ = 0;
  PeriodicMPS inner_;
};

// exact channel eigenvalue MPS over pair signatures, d >= 1
EigenvalueMPS build_t_mps(int n, int d);

// eigenvalue for any depth; d in {0, kDepthInfinite} served by closed forms,
// otherwise mps must point at build_t_mps(n, d)
double t_value(const PauliString& p, int d, const EigenvalueMPS* mps = nullptr);

class PairEigenvalueMPS {
 public:
  PairEigenvalueMPS() = default;
  PairEigenvalueMPS(int n, int d, SiteTensor cell);

  int num_qubits() const { return n_; }
  int depth() const { return d_; }
  int bond_dim() const;

  // joint probability that both Paulis scramble to Z-type strings
  double value(const PauliString& a, const PauliString& b) const;

  // per-qubit form with physical dimension 16 (joint label 4*g+g'), obtained
  // by an exact split of each pair cell; guarded, intended for small depth
  PeriodicMPS to_qubit_mps() const;

 private:
  int n_ = 0;
  int d_ = 0;
  SiteTensor cell_;  // shared by all n/2 sites
};

PairEigenvalueMPS build_tau_mps(int n, int d);

// pair probability for any supported depth (0 analytic, 1..kMaxTauDepth via mps)
double tau_value(const PauliString& a, const PauliString& b, int d,
                 const PairEigenvalueMPS* mps = nullptr);

// n-site physical-dimension-4 MPS whose value on a label string equals the
// signature-level input evaluated on the string's pair signature
PeriodicMPS lift_to_pauli_mps(const PeriodicMPS& sig, int n);

// closed-form lifted eigenvalue (or elementwise inverse) MPS for d = 0
PeriodicMPS lift_depth0(int n, bool inverse);
// same for the deep limit (uniform global Clifford)
PeriodicMPS lift_depth_infinite(int n, bool inverse);

// pointwise multiply a Pauli-coefficient MPS by the channel eigenvalues (or by
// a supplied approximate inverse in signature form when invert is set)
PeriodicMPS apply_channel(const PeriodicMPS& alpha, const EigenvalueMPS& t, bool invert = false,
                          const PeriodicMPS* inverse_sig = nullptr);

}  // namespace brickshadows
