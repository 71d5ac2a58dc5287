#include "brickshadows/shadows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "brickshadows/rng.hpp"

namespace brickshadows {

namespace {

// Measurement outcomes draw from a salted key. A plain offset on the seed or
// stream would collide with the gate draws of a neighbouring stream, because
// the stream mixing is additive in (seed, stream).
constexpr uint64_t kOutcomeSalt = 0xd6e8feb86659fd93ULL;

void check_bits(const std::vector<uint8_t>& bits, int n) {
  if (static_cast<int>(bits.size()) != n)
    throw std::invalid_argument("snapshot record: outcome_bits length mismatch");
  for (uint8_t b : bits)
    if (b > 1) throw std::invalid_argument("snapshot record: outcome bits must be 0 or 1");
}

// Pull one entangling gate back through the coefficient MPS. Sites q1 and
// q2 = q1+1 mod n are merged along their shared bond, the signed label
// permutation of the inverse gate is applied, and the result is split with
// the data landing on the thinner side of the cut.
void pull_back_gate2(PeriodicMPS& mps, const Gate2& g, int q1, int q2) {
  SiteTensor& a = mps.site(q1);
  SiteTensor& b = mps.site(q2);
  const int rows = static_cast<int>(a[0].rows());
  const int cols = static_cast<int>(b[0].cols());

  std::vector<Eigen::MatrixXd> merged(16);
  for (int m = 0; m < 16; ++m)
    merged[m] = g.sign[m] * (a[unpack2_first(g.perm[m])] * b[unpack2_second(g.perm[m])]);

  SiteTensor na(4), nb(4);
  if (rows <= cols) {
    const int bond = 4 * rows;
    for (int l1 = 0; l1 < 4; ++l1) {
      na[l1] = Eigen::MatrixXd::Zero(rows, bond);
      for (int r = 0; r < rows; ++r) na[l1](r, r * 4 + l1) = 1.0;
    }
    for (int l2 = 0; l2 < 4; ++l2) {
      nb[l2] = Eigen::MatrixXd::Zero(bond, cols);
      for (int l1 = 0; l1 < 4; ++l1)
        for (int r = 0; r < rows; ++r) nb[l2].row(r * 4 + l1) = merged[pack2(l1, l2)].row(r);
    }
  } else {
    const int bond = 4 * cols;
    for (int l1 = 0; l1 < 4; ++l1) {
      na[l1] = Eigen::MatrixXd::Zero(rows, bond);
      for (int l2 = 0; l2 < 4; ++l2)
        for (int c = 0; c < cols; ++c) na[l1].col(c * 4 + l2) = merged[pack2(l1, l2)].col(c);
    }
    for (int l2 = 0; l2 < 4; ++l2) {
      nb[l2] = Eigen::MatrixXd::Zero(bond, cols);
      for (int c = 0; c < cols; ++c) nb[l2](c * 4 + l2, c) = 1.0;
    }
  }
  a = std::move(na);
  b = std::move(nb);
}

std::vector<double> split_block_means(const std::vector<double>& values, int blocks) {
  const int count = static_cast<int>(values.size());
  if (blocks < 1 || blocks > count)
    throw std::invalid_argument("median of means: block count must be in [1, sample count]");
  std::vector<double> means(blocks);
  const int base = count / blocks;
  const int extra = count % blocks;
  int pos = 0;
  for (int b = 0; b < blocks; ++b) {
    const int len = base + (b < extra ? 1 : 0);
    double s = 0.0;
    for (int i = 0; i < len; ++i) s += values[pos + i];
    means[b] = s / len;
    pos += len;
  }
  return means;
}

double median_of(std::vector<double> v) {
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
  }
  return hi;
}

EstimationResult finish_estimate(const std::vector<double>& values, int blocks,
                                 double herald_epsilon, const std::string& description) {
  EstimationResult r;
  r.block_means = split_block_means(values, blocks);
  r.estimate = median_of(r.block_means);
  r.herald_epsilon = herald_epsilon;
  r.config_hash = config_hash_of(description);
  if (values.size() >= 2) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    r.empirical_variance = ss / static_cast<double>(values.size() - 1);
  }
  return r;
}

void check_record_shapes(const std::vector<Snapshot>& snaps, int* n_out, int* d_out) {
  if (snaps.empty()) throw std::invalid_argument("estimate: no measurement records");
  const int n = snaps.front().n;
  const int d = snaps.front().d;
  for (const Snapshot& s : snaps)
    if (s.n != n || s.d != d)
      throw std::invalid_argument("estimate: records mix qubit counts or depths");
  *n_out = n;
  *d_out = d;
}

}  // namespace

std::string Snapshot::to_json_line() const {
  nlohmann::json j;
  j["n"] = n;
  j["d"] = d;
  j["outcome_bits"] = bits;
  if (explicit_gates) {
    j["layer0"] = circuit.layer0;
    j["layers"] = circuit.layers;
  } else {
    j["seed"] = seed;
    j["stream_id"] = stream;
  }
  return j.dump();
}

Snapshot Snapshot::from_json_line(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  Snapshot s;
  s.n = j.at("n").get<int>();
  s.d = j.at("d").get<int>();
  if (s.n <= 0) throw std::invalid_argument("snapshot record: bad qubit count");
  if (s.d < 0 && s.d != kDepthInfinite)
    throw std::invalid_argument("snapshot record: bad depth");
  s.bits = j.at("outcome_bits").get<std::vector<uint8_t>>();
  check_bits(s.bits, s.n);
  if (j.contains("layer0")) {
    if (s.d < 0)
      throw std::invalid_argument("snapshot record: explicit gates need a finite depth");
    s.explicit_gates = true;
    s.circuit.n = s.n;
    s.circuit.d = s.d;
    s.circuit.layer0 = j.at("layer0").get<std::vector<int>>();
    s.circuit.layers = j.at("layers").get<std::vector<std::vector<int>>>();
    if (static_cast<int>(s.circuit.layer0.size()) != s.n ||
        static_cast<int>(s.circuit.layers.size()) != s.d)
      throw std::invalid_argument("snapshot record: gate list shape mismatch");
    const auto& groups = CliffordGroups::instance();
    for (int idx : s.circuit.layer0)
      if (idx < 0 || idx >= groups.size1())
        throw std::invalid_argument("snapshot record: single-qubit gate index out of range");
    for (const auto& layer : s.circuit.layers) {
      if (static_cast<int>(layer.size()) != s.n / 2)
        throw std::invalid_argument("snapshot record: gate list shape mismatch");
      for (int idx : layer)
        if (idx < 0 || idx >= groups.size2())
          throw std::invalid_argument("snapshot record: two-qubit gate index out of range");
    }
  } else {
    s.seed = j.at("seed").get<uint64_t>();
    s.stream = j.at("stream_id").get<uint64_t>();
  }
  return s;
}

std::vector<Snapshot> acquire(const StabilizerState& state, int d, uint64_t seed, int count,
                              uint64_t first_stream) {
  if (count < 0) throw std::invalid_argument("acquire: negative record count");
  const int n = state.n;
  if (d != kDepthInfinite) validate_brickwork_spec({n, d, seed});
  if (n <= 0) throw std::invalid_argument("acquire: empty state");

  std::vector<Snapshot> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const uint64_t stream = first_stream + static_cast<uint64_t>(i);
    Snapshot s;
    s.seed = seed;
    s.stream = stream;
    s.n = n;
    s.d = d;
    StabilizerSimulator sim(state);
    if (d >= 0) {
      sim.apply_circuit(sample_brickwork({n, d, seed}, stream));
    } else {
      Rng gate_rng(seed, stream);
      sim.apply_tableau(random_clifford_tableau(n, gate_rng));
    }
    Rng outcome_rng(seed ^ kOutcomeSalt, stream);
    s.bits = sim.measure_all(outcome_rng);
    out.push_back(std::move(s));
  }
  return out;
}

void write_snapshots(std::ostream& out, const std::vector<Snapshot>& snaps) {
  for (const Snapshot& s : snaps) out << s.to_json_line() << '\n';
}

std::vector<Snapshot> read_snapshots(std::istream& in) {
  std::vector<Snapshot> snaps;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    snaps.push_back(Snapshot::from_json_line(line));
  }
  return snaps;
}

BrickworkCircuit snapshot_circuit(const Snapshot& s) {
  if (s.explicit_gates) return s.circuit;
  if (s.d < 0)
    throw std::invalid_argument("snapshot_circuit: no gate list for the infinite-depth ensemble");
  return sample_brickwork({s.n, s.d, s.seed}, s.stream);
}

CliffordTableau snapshot_tableau(const Snapshot& s) {
  if (s.d >= 0) return circuit_tableau(snapshot_circuit(s));
  Rng gate_rng(s.seed, s.stream);
  return random_clifford_tableau(s.n, gate_rng);
}

int snapshot_pauli_value(const Snapshot& s, const PauliString& p) {
  if (p.num_qubits() != s.n)
    throw std::invalid_argument("snapshot_pauli_value: qubit count mismatch");
  return snapshot_tableau(s).conjugate(p).basis_expectation(s.bits);
}

PeriodicMPS snapshot_to_pauli_mps(const Snapshot& s) {
  if (s.d < 0)
    throw std::invalid_argument("snapshot_to_pauli_mps: needs a finite-depth record");
  const BrickworkCircuit c = snapshot_circuit(s);
  const auto& groups = CliffordGroups::instance();
  const int n = s.n;

  // coefficients of |b><b|: (I + (-1)^b Z) / 2 on each qubit
  std::vector<std::vector<double>> start(n);
  for (int q = 0; q < n; ++q) start[q] = {0.5, s.bits[q] ? -0.5 : 0.5, 0.0, 0.0};
  PeriodicMPS mps = PeriodicMPS::product(start);

  // conjugate by the inverse circuit, so the last entangling layer acts first
  for (int layer = c.d; layer >= 1; --layer) {
    const auto pairs = brickwork_pairs(n, layer);
    for (size_t k = 0; k < pairs.size(); ++k) {
      const Gate2& g = groups.gate2(c.layers[layer - 1][k]);
      pull_back_gate2(mps, g, pairs[k].first, pairs[k].second);
    }
  }
  for (int q = 0; q < n; ++q) {
    const Gate1& g = groups.gate1(c.layer0[q]);
    SiteTensor& a = mps.site(q);
    SiteTensor next(4);
    for (int x = 0; x < 4; ++x) next[x] = g.sign[x] * a[g.perm[x]];
    a = std::move(next);
  }
  return mps;
}

void SparseObservable::add(PauliString p, double coeff) {
  if (p.num_qubits() != n) throw std::invalid_argument("SparseObservable: qubit count mismatch");
  if (!p.is_hermitian()) throw std::invalid_argument("SparseObservable: non-Hermitian term");
  coeff *= p.sign();
  p.set_phase(0);
  paulis.push_back(std::move(p));
  coeffs.push_back(coeff);
}

double SparseObservable::infinity_norm_bound() const {
  double s = 0.0;
  for (double c : coeffs) s += std::abs(c);
  return s;
}

SparseObservable ghz_projector_terms(int n) {
  if (n < 2 || n > 16)
    throw std::invalid_argument("ghz_projector_terms: term count is 2^n, supported for n in [2, 16]");
  const StabilizerState st = StabilizerState::ghz(n);
  SparseObservable obs(n);
  const double w = std::ldexp(1.0, -n);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    PauliString p(n);
    for (int g = 0; g < n; ++g)
      if ((mask >> g) & 1) p = p.times(st.generators[g]);
    obs.add(std::move(p), w);
  }
  return obs;
}

SparseObservable cluster_hamiltonian(int n) {
  if (n < 3) throw std::invalid_argument("cluster_hamiltonian: need at least 3 qubits");
  SparseObservable obs(n);
  for (int i = 0; i < n; ++i) {
    PauliString zzz(n);
    zzz.set_label((i + n - 1) % n, kPauliZ);
    zzz.set_label(i, kPauliZ);
    zzz.set_label((i + 1) % n, kPauliZ);
    obs.add(std::move(zzz), 1.0);
    PauliString x(n);
    x.set_label(i, kPauliX);
    obs.add(std::move(x), 1.0);
  }
  return obs;
}

PeriodicMPS ghz_projector_mps(int n) {
  if (n < 2) throw std::invalid_argument("ghz_projector_mps: need at least 2 qubits");
  // Two decoupled 2x2 blocks. The first tracks the Z-parity sectors, the
  // second rotates by a quarter turn per Y so the closing trace yields
  // (-1)^{#Y/2} on even-Y {X,Y} strings and 0 on odd ones.
  SiteTensor site(4, Eigen::MatrixXd::Zero(4, 4));
  site[kPauliI](0, 0) = 0.5;
  site[kPauliI](1, 1) = 0.5;
  site[kPauliZ](0, 0) = 0.5;
  site[kPauliZ](1, 1) = -0.5;
  site[kPauliX](2, 2) = 0.5;
  site[kPauliX](3, 3) = 0.5;
  site[kPauliY](2, 3) = -0.5;
  site[kPauliY](3, 2) = 0.5;
  std::vector<SiteTensor> sites(static_cast<size_t>(n), site);
  PeriodicMPS mps(std::move(sites));
  mps.scale(0.5);  // both blocks contribute trace 2
  return mps;
}

PeriodicMPS sparse_to_mps(const SparseObservable& obs) {
  if (obs.n <= 0 || obs.size() == 0)
    throw std::invalid_argument("sparse_to_mps: empty observable");
  const int r = obs.size();
  std::vector<SiteTensor> sites(obs.n);
  for (int j = 0; j < obs.n; ++j) {
    SiteTensor site(4, Eigen::MatrixXd::Zero(r, r));
    for (int k = 0; k < r; ++k)
      site[obs.paulis[k].label(j)](k, k) = (j == 0) ? obs.coeffs[k] : 1.0;
    sites[j] = std::move(site);
  }
  return PeriodicMPS(std::move(sites));
}

double median_of_means(const std::vector<double>& values, int blocks) {
  return median_of(split_block_means(values, blocks));
}

std::string EstimationResult::to_json() const {
  nlohmann::json j;
  j["estimate"] = estimate;
  j["block_means"] = block_means;
  j["herald_epsilon"] = herald_epsilon;
  j["variance_bound"] = variance_bound;
  j["empirical_variance"] = empirical_variance;
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(config_hash));
  j["config_hash"] = buf;
  return j.dump();
}

EstimationResult estimate_sparse(const SparseObservable& obs, const std::vector<Snapshot>& snaps,
                                 const EigenvalueMPS* t, int blocks) {
  int n = 0, d = 0;
  check_record_shapes(snaps, &n, &d);
  if (obs.n != n) throw std::invalid_argument("estimate_sparse: observable size mismatch");
  if (obs.size() == 0) throw std::invalid_argument("estimate_sparse: empty observable");

  std::unique_ptr<EigenvalueMPS> local;
  if (t == nullptr && d >= 1) {
    local = std::make_unique<EigenvalueMPS>(build_t_mps(n, d));
    t = local.get();
  }
  std::vector<double> inv_t(obs.size());
  for (int k = 0; k < obs.size(); ++k) inv_t[k] = 1.0 / t_value(obs.paulis[k], d, t);

  std::vector<double> values(snaps.size());
  for (size_t i = 0; i < snaps.size(); ++i) {
    const CliffordTableau tab = snapshot_tableau(snaps[i]);
    double v = 0.0;
    for (int k = 0; k < obs.size(); ++k) {
      const int e = tab.conjugate(obs.paulis[k]).basis_expectation(snaps[i].bits);
      if (e != 0) v += obs.coeffs[k] * inv_t[k] * e;
    }
    values[i] = v;
  }

  const std::string desc = "estimate-sparse n=" + std::to_string(n) + " d=" + std::to_string(d) +
                           " terms=" + std::to_string(obs.size()) +
                           " records=" + std::to_string(snaps.size()) +
                           " blocks=" + std::to_string(blocks);
  return finish_estimate(values, blocks, 0.0, desc);
}

EstimationResult estimate_shallow(const PeriodicMPS& observable, const std::vector<Snapshot>& snaps,
                                  const PeriodicMPS& inverse_lifted, double herald_epsilon,
                                  int blocks, InverseSide side) {
  int n = 0, d = 0;
  check_record_shapes(snaps, &n, &d);
  if (d < 0)
    throw std::invalid_argument("estimate_shallow: records must come from a finite-depth ensemble");
  if (observable.num_sites() != n || inverse_lifted.num_sites() != n)
    throw std::invalid_argument("estimate_shallow: factor site counts disagree with the records");
  for (int j = 0; j < n; ++j)
    if (observable.phys_dim(j) != 4 || inverse_lifted.phys_dim(j) != 4)
      throw std::invalid_argument("estimate_shallow: factors must have one Pauli label per site");

  const double scale = std::ldexp(1.0, n);
  std::vector<double> values(snaps.size());
  if (side == InverseSide::kSnapshot) {
    for (size_t i = 0; i < snaps.size(); ++i) {
      const PeriodicMPS corrected =
          PeriodicMPS::hadamard(snapshot_to_pauli_mps(snaps[i]), inverse_lifted);
      const PeriodicMPS* factors[] = {&observable, &corrected};
      values[i] = scale * PeriodicMPS::sum_product(factors);
    }
  } else {
    const PeriodicMPS corrected = PeriodicMPS::hadamard(observable, inverse_lifted);
    for (size_t i = 0; i < snaps.size(); ++i) {
      const PeriodicMPS snap = snapshot_to_pauli_mps(snaps[i]);
      const PeriodicMPS* factors[] = {&corrected, &snap};
      values[i] = scale * PeriodicMPS::sum_product(factors);
    }
  }

  const std::string desc = "estimate-shallow n=" + std::to_string(n) + " d=" + std::to_string(d) +
                           " records=" + std::to_string(snaps.size()) +
                           " blocks=" + std::to_string(blocks) +
                           " side=" + std::to_string(static_cast<int>(side));
  return finish_estimate(values, blocks, herald_epsilon, desc);
}

uint64_t config_hash_of(const std::string& text) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace brickshadows
