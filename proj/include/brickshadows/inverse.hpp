#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "brickshadows/channel.hpp"
#include "brickshadows/mps.hpp"

namespace brickshadows {

enum class Regularization { kNone, kTranslational, kNorm };

struct InversionStage {
  int chi = 2;
  int sweeps = 200;
};

struct InversionConfig {
  std::vector<InversionStage> stages{{2, 200}};
  double stop_cost = 1e-12;  // finish once the residual cost drops below this
  Regularization reg = Regularization::kTranslational;
  double alpha = -1.0;  // regularization strength; negative means adaptive,
                        // reset to the current residual at each sweep
  uint64_t seed = 1;
};

struct InversionResult {
  PeriodicMPS inverse;  // signature level, physical dimension 2
  int n = 0;
  int d = 0;
  int chi = 0;
  double final_cost = 0.0;       // residual sum of squares at the returned iterate
  double herald_epsilon = 0.0;   // sqrt(final_cost), certifies worst-case bias
  bool converged = false;
  int sweeps_used = 0;
  double cancellation_scale = 0.0;  // absolute accuracy floor of the reported cost
  std::vector<double> cost_history;

  std::string to_json() const;
  static InversionResult from_json(const std::string& text);
};

// sum over binary strings x of (m(x) v(x) - 1)^2, by ring contraction
double inversion_cost(const PeriodicMPS& m, const PeriodicMPS& v);
// same by explicit enumeration; exact reference for modest site counts
double inversion_cost_exhaustive(const PeriodicMPS& m, const PeriodicMPS& v);
// translation spread: sum over slices of squared distance to the site mean,
// zero exactly when every site carries the same tensor
double translation_spread(const PeriodicMPS& v);

// quadratic expansion of the residual in site j's slice k with everything else
// frozen: contribution = <x|A|x> + <b|x> + 2^(N-1), x the vectorized slice in
// row-major order
void local_quadratic(const PeriodicMPS& m, const PeriodicMPS& v, int site, int k,
                     Eigen::MatrixXd* a_out, Eigen::VectorXd* b_out);

// minimum-norm solution of 2Ax + b = 0 with spectral cutoff 1e-12
Eigen::VectorXd local_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                            double* residual = nullptr);

// alternating least squares over sites and slices; every local update is kept
// only if the full regularized cost does not increase
InversionResult invert(const PeriodicMPS& m, const InversionConfig& cfg);
InversionResult invert(const EigenvalueMPS& t, const InversionConfig& cfg);

}  // namespace brickshadows
