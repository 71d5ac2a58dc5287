#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "brickshadows/brickwork.hpp"
#include "brickshadows/channel.hpp"
#include "brickshadows/mps.hpp"

namespace brickshadows {

// One measurement record: which random circuit was applied (replayable from
// seed and stream, or spelled out as gate indices) and the observed bits.
struct Snapshot {
  uint64_t seed = 0;
  uint64_t stream = 0;
  int n = 0;
  int d = 0;  // kDepthInfinite marks the uniform-Clifford ensemble
  std::vector<uint8_t> bits;
  bool explicit_gates = false;
  BrickworkCircuit circuit;  // authoritative when explicit_gates is set

  std::string to_json_line() const;
  static Snapshot from_json_line(const std::string& line);
};

// draw `count` records from the state under the depth-d ensemble, using
// streams first_stream..first_stream+count-1 of `seed`
std::vector<Snapshot> acquire(const StabilizerState& state, int d, uint64_t seed, int count,
                              uint64_t first_stream = 0);

void write_snapshots(std::ostream& out, const std::vector<Snapshot>& snaps);
std::vector<Snapshot> read_snapshots(std::istream& in);

BrickworkCircuit snapshot_circuit(const Snapshot& s);  // finite depth only
CliffordTableau snapshot_tableau(const Snapshot& s);

// <b| U P U^dag |b> for the record's circuit: -1, 0, or +1
int snapshot_pauli_value(const Snapshot& s, const PauliString& p);

// Pauli coefficient MPS of U^dag |b><b| U, built by pulling the projector
// back through the gates as signed label permutations; finite depth only
PeriodicMPS snapshot_to_pauli_mps(const Snapshot& s);

struct SparseObservable {
  int n = 0;
  std::vector<PauliString> paulis;  // stored with phase 0
  std::vector<double> coeffs;       // any sign of the string folded in

  explicit SparseObservable(int nq = 0) : n(nq) {}
  void add(PauliString p, double coeff);
  int size() const { return static_cast<int>(paulis.size()); }
  double infinity_norm_bound() const;  // sum of |coeff|
};

// the 2^n signed stabilizer-group terms of the GHZ projector
SparseObservable ghz_projector_terms(int n);
// ring of three-body ZZZ terms plus a transverse X per qubit, unit weights
SparseObservable cluster_hamiltonian(int n);
// Pauli coefficient MPS of the GHZ projector, bond dimension 4
PeriodicMPS ghz_projector_mps(int n);
// coefficient MPS of any sparse observable, bond = term count
PeriodicMPS sparse_to_mps(const SparseObservable& obs);

// median of `blocks` consecutive block means; blocks = 1 is the plain mean
double median_of_means(const std::vector<double>& values, int blocks);

struct EstimationResult {
  double estimate = 0.0;
  std::vector<double> block_means;
  double herald_epsilon = 0.0;      // certified inversion bias scale, 0 = exact
  double variance_bound = 0.0;      // caller-supplied when known
  double empirical_variance = 0.0;  // sample variance of per-record values
  uint64_t config_hash = 0;

  std::string to_json() const;
};

// which factor absorbs the channel inverse in the contraction estimator; the
// two sides produce identical values, auto picks the cheaper observable side
enum class InverseSide { kAuto, kObservable, kSnapshot };

// unbiased estimator from exact channel eigenvalues; `t` may stay null when
// the records' depth is 0 or infinite
EstimationResult estimate_sparse(const SparseObservable& obs, const std::vector<Snapshot>& snaps,
                                 const EigenvalueMPS* t = nullptr, int blocks = 1);

// contraction estimator: per-record value 2^n sum_l beta_l v_l alpha_l
EstimationResult estimate_shallow(const PeriodicMPS& observable, const std::vector<Snapshot>& snaps,
                                  const PeriodicMPS& inverse_lifted, double herald_epsilon,
                                  int blocks = 1, InverseSide side = InverseSide::kAuto);

uint64_t config_hash_of(const std::string& text);

}  // namespace brickshadows
