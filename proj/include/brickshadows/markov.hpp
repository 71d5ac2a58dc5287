#pragma once

#include <Eigen/Dense>

namespace brickshadows {

// Dense propagation of the label walk over every Pauli string at once.
// Exponential in n; serves as an exact cross-check for the MPS channel values.
class DenseMarkovOracle {
 public:
  // Channel eigenvalue for every label string. Entry index is base 4 with
  // qubit 0 the least significant digit. n <= 10, d >= 0 finite.
  static Eigen::VectorXd all_eigenvalues(int n, int d);

  // Joint Z-readout probability for every pair of label strings. Entry index
  // is base 16 over per-qubit joint labels 4*g + g', qubit 0 least
  // significant. n <= 6, d >= 0 finite.
  static Eigen::VectorXd all_pair_values(int n, int d);
};

}  // namespace brickshadows
