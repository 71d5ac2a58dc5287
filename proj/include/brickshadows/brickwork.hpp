#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "brickshadows/clifford.hpp"
#include "brickshadows/pauli.hpp"
#include "brickshadows/rng.hpp"

namespace brickshadows {

// Depth sentinel: the uniform-Clifford (infinite depth) ensemble.
inline constexpr int kDepthInfinite = -1;

// Measurement ensemble on a ring of n qubits (n even): one layer of uniform
// single-qubit Cliffords, then d brickwork layers of uniform two-qubit
// Cliffords. Odd layers couple (0,1),(2,3),...; even layers couple
// (1,2),(3,4),...,(n-1,0).
struct BrickworkSpec {
  int n = 0;
  int d = 0;
  uint64_t seed = 0;
};

void validate_brickwork_spec(const BrickworkSpec& spec);

// Gate pairs of entangling layer `layer` (1-based).
std::vector<std::pair<int, int>> brickwork_pairs(int n, int layer);

struct BrickworkCircuit {
  int n = 0;
  int d = 0;
  std::vector<int> layer0;               // n single-qubit gate indices
  std::vector<std::vector<int>> layers;  // d entangling layers, n/2 gates each
};

// Deterministic in (spec.seed, stream): the gates are the stream's draws in
// layout order. stream is the snapshot id.
BrickworkCircuit sample_brickwork(const BrickworkSpec& spec, uint64_t stream);

CliffordTableau circuit_tableau(const BrickworkCircuit& c);

// U P U^dagger for the circuit's unitary (layer 0 applied first).
PauliString conjugate_through(const BrickworkCircuit& c, const PauliString& p);

// Fraction of `shots` independent circuit draws under which U P U^dagger is a
// +-Z string. Streams shot_offset .. shot_offset+shots-1 are used.
double monte_carlo_t(const PauliString& p, const BrickworkSpec& spec, int shots,
                     uint64_t shot_offset = 0);

// Pure stabilizer state given by n independent commuting generators.
struct StabilizerState {
  int n = 0;
  std::vector<PauliString> generators;

  static StabilizerState zero(int n);
  static StabilizerState ghz(int n);
  static StabilizerState from_generators(std::vector<PauliString> gens);
};

// Aaronson-Gottesman style simulator: stabilizer plus destabilizer rows.
class StabilizerSimulator {
 public:
  explicit StabilizerSimulator(const StabilizerState& state);

  int num_qubits() const { return n_; }
  void apply_gate1(const Gate1& g, int q);
  void apply_gate2(const Gate2& g, int q1, int q2);
  void apply_circuit(const BrickworkCircuit& c);
  void apply_tableau(const CliffordTableau& t);

  int measure_z(int q, Rng& rng);
  std::vector<uint8_t> measure_all(Rng& rng);

  const std::vector<PauliString>& stabilizers() const { return stab_; }

 private:
  int n_;
  std::vector<PauliString> stab_, destab_;
};

}  // namespace brickshadows
