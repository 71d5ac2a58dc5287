#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brickshadows/brickwork.hpp"
#include "brickshadows/channel.hpp"
#include "brickshadows/shadows.hpp"

namespace brickshadows {

// squared shadow norm of a single non-identity Pauli: 1 / t
double pauli_norm_sq(const PauliString& p, int d, const EigenvalueMPS* t = nullptr);

// squared locally scrambled shadow norm: sum over labels of beta^2 / t
// (labels appearing twice in the term list are merged first)
double ls_norm_sq(const SparseObservable& obs, int d, const EigenvalueMPS* t = nullptr);
// contraction variant for coefficient-MPS observables, using a lifted
// approximate inverse in place of 1/t
double ls_norm_sq(const PeriodicMPS& observable, const PeriodicMPS& inverse_lifted);

// triangle bound on the squared shadow norm of a sparse observable:
// (sum over labels of |beta| / sqrt(t))^2
double sparse_norm_bound_sq(const SparseObservable& obs, int d, const EigenvalueMPS* t = nullptr);

// <psi| P |psi> for a pure stabilizer state: -1, 0 or +1, by group lookup
double stabilizer_expectation(const StabilizerState& state, const PauliString& p);

// exact squared state-dependent shadow norm of a sparse observable measured
// on a stabilizer state: the locally scrambled part plus the cross-term
// trace, evaluated over all term pairs
double state_dep_norm_sq_exact(const SparseObservable& obs, const StabilizerState& sigma, int d);

// empirical second moment of the single-record estimate when the measured
// state is sigma; converges to the squared state-dependent shadow norm
struct MonteCarloNorm {
  double mean = 0.0;
  double std_error = 0.0;
  int shots = 0;
};
MonteCarloNorm mc_state_dep_norm_sq(const SparseObservable& obs, const StabilizerState& sigma,
                                    int d, uint64_t seed, int shots,
                                    const EigenvalueMPS* t = nullptr);

// squared shadow norm of the projector onto the subspace stabilized by k
// commuting generators: 4^{-k} sum over group element pairs of tau / (t t')
double stabilizer_projector_norm_sq(const std::vector<PauliString>& generators, int d,
                                    const EigenvalueMPS* t = nullptr,
                                    const PairEigenvalueMPS* tau = nullptr);

// state-independent bound on the squared shadow norm of an MPS observable:
// the diagonal part plus the Frobenius norm of the cross-term operator, both
// by exact contraction (d <= 2; the cross term is contracted per brick pair
// and rejected when the working bond would exceed the exact budget)
struct FrobeniusBound {
  double ls_sq = 0.0;          // sum of beta^2 v over labels
  double diag_sq = 0.0;        // sum of beta^2 v^2 t; equals ls_sq when v = 1/t
  double cross_frob_sq = 0.0;  // squared Frobenius norm of the cross-term operator
  double bound_sq = 0.0;       // diag_sq + sqrt(max(cross_frob_sq, 0))
};
FrobeniusBound frobenius_norm_bound(const PeriodicMPS& observable,
                                    const PeriodicMPS& inverse_lifted, int d);

// analytic lower bound on the channel eigenvalue at depth d for a label of
// given support extent; requires alpha > 1, c > 0,
// n > (25 c / 18)^{1/(alpha-1)} and d >= (alpha ln n + ln(1/c)) / ln(25/16)
double eigenvalue_lower_bound(int n, int d, int support_extent, double alpha, double c);
// the depth threshold above, rounded up to an integer
int eigenvalue_bound_min_depth(int n, double alpha, double c);

struct NormReport {
  std::string kind;
  int n = 0;
  int d = 0;
  double value_sq = 0.0;

  std::string to_json() const;
};

}  // namespace brickshadows
