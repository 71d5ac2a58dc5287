#include "brickshadows/brickwork.hpp"

#include <stdexcept>

namespace brickshadows {

void validate_brickwork_spec(const BrickworkSpec& spec) {
  if (spec.n < 2 || spec.n % 2 != 0)
    throw std::invalid_argument("brickwork layout needs an even number of qubits >= 2");
  if (spec.d < 0 && spec.d != kDepthInfinite)
    throw std::invalid_argument("depth must be >= 0 or the infinite sentinel");
}

std::vector<std::pair<int, int>> brickwork_pairs(int n, int layer) {
  if (layer < 1) throw std::invalid_argument("entangling layers are 1-based");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n / 2);
  const int offset = (layer % 2 == 1) ? 0 : 1;
  for (int i = 0; i < n / 2; ++i) {
    const int a = (2 * i + offset) % n;
    const int b = (2 * i + 1 + offset) % n;
    pairs.emplace_back(a, b);
  }
  return pairs;
}

BrickworkCircuit sample_brickwork(const BrickworkSpec& spec, uint64_t stream) {
  validate_brickwork_spec(spec);
  if (spec.d == kDepthInfinite)
    throw std::invalid_argument("infinite depth has no brickwork circuit; draw a tableau");
  const CliffordGroups& groups = CliffordGroups::instance();
  Rng rng(spec.seed, stream);
  BrickworkCircuit c;
  c.n = spec.n;
  c.d = spec.d;
  c.layer0.resize(spec.n);
  for (int q = 0; q < spec.n; ++q)
    c.layer0[q] = static_cast<int>(rng.next_below(groups.size1()));
  c.layers.resize(spec.d);
  for (int l = 0; l < spec.d; ++l) {
    c.layers[l].resize(spec.n / 2);
    for (int i = 0; i < spec.n / 2; ++i)
      c.layers[l][i] = static_cast<int>(rng.next_below(groups.size2()));
  }
  return c;
}

CliffordTableau circuit_tableau(const BrickworkCircuit& c) {
  const CliffordGroups& groups = CliffordGroups::instance();
  CliffordTableau t = CliffordTableau::identity(c.n);
  for (int q = 0; q < c.n; ++q) t.push_gate1(groups.gate1(c.layer0[q]), q);
  for (int l = 0; l < c.d; ++l) {
    const auto pairs = brickwork_pairs(c.n, l + 1);
    for (int i = 0; i < c.n / 2; ++i)
      t.push_gate2(groups.gate2(c.layers[l][i]), pairs[i].first, pairs[i].second);
  }
  return t;
}

PauliString conjugate_through(const BrickworkCircuit& c, const PauliString& p) {
  if (p.num_qubits() != c.n) throw std::invalid_argument("conjugate_through: size mismatch");
  const CliffordGroups& groups = CliffordGroups::instance();
  PauliString out = p;
  for (int q = 0; q < c.n; ++q) apply_gate1_to_pauli(groups.gate1(c.layer0[q]), q, out);
  for (int l = 0; l < c.d; ++l) {
    const auto pairs = brickwork_pairs(c.n, l + 1);
    for (int i = 0; i < c.n / 2; ++i)
      apply_gate2_to_pauli(groups.gate2(c.layers[l][i]), pairs[i].first, pairs[i].second, out);
  }
  return out;
}

double monte_carlo_t(const PauliString& p, const BrickworkSpec& spec, int shots,
                     uint64_t shot_offset) {
  validate_brickwork_spec(spec);
  if (shots <= 0) throw std::invalid_argument("monte_carlo_t: shots must be positive");
  int hits = 0;
  for (int s = 0; s < shots; ++s) {
    const BrickworkCircuit c = sample_brickwork(spec, shot_offset + s);
    if (conjugate_through(c, p).is_z_type()) ++hits;
  }
  return static_cast<double>(hits) / shots;
}

StabilizerState StabilizerState::zero(int n) {
  StabilizerState s;
  s.n = n;
  for (int q = 0; q < n; ++q) {
    PauliString z(n);
    z.set_label(q, kPauliZ);
    s.generators.push_back(std::move(z));
  }
  return s;
}

StabilizerState StabilizerState::ghz(int n) {
  if (n < 2) throw std::invalid_argument("ghz needs n >= 2");
  StabilizerState s;
  s.n = n;
  PauliString xs(n);
  for (int q = 0; q < n; ++q) xs.set_label(q, kPauliX);
  s.generators.push_back(std::move(xs));
  for (int q = 0; q + 1 < n; ++q) {
    PauliString zz(n);
    zz.set_label(q, kPauliZ);
    zz.set_label(q + 1, kPauliZ);
    s.generators.push_back(std::move(zz));
  }
  return s;
}

namespace {

uint64_t sym_vec(const PauliString& p) {
  uint64_t v = 0;
  const int n = p.num_qubits();
  for (int q = 0; q < n; ++q) {
    if (pauli_x_bit(p.label(q))) v |= 1ULL << q;
    if (pauli_z_bit(p.label(q))) v |= 1ULL << (n + q);
  }
  return v;
}

int gf2_rank(std::vector<uint64_t> rows) {
  int rank = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) continue;
    const uint64_t lb = 1ULL << (63 - __builtin_clzll(rows[i]));
    ++rank;
    for (size_t j = 0; j < rows.size(); ++j)
      if (j != i && (rows[j] & lb)) rows[j] ^= rows[i];
  }
  return rank;
}

}  // namespace

StabilizerState StabilizerState::from_generators(std::vector<PauliString> gens) {
  if (gens.empty()) throw std::invalid_argument("no generators given");
  const int n = gens[0].num_qubits();
  if (static_cast<int>(gens.size()) != n)
    throw std::invalid_argument("pure state needs exactly n generators (mixed input rejected)");
  std::vector<uint64_t> vecs;
  for (const PauliString& g : gens) {
    if (g.num_qubits() != n) throw std::invalid_argument("generator size mismatch");
    if (!g.is_hermitian()) throw std::invalid_argument("generator must be Hermitian");
    if (g.is_identity())
      throw std::invalid_argument(g.sign() < 0 ? "generator equals -I" : "generator equals I");
    vecs.push_back(sym_vec(g));
  }
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = i + 1; j < gens.size(); ++j)
      if (!gens[i].commutes_with(gens[j]))
        throw std::invalid_argument("generators do not commute");
  if (gf2_rank(vecs) != n) throw std::invalid_argument("generators are dependent");
  StabilizerState s;
  s.n = n;
  s.generators = std::move(gens);
  return s;
}

StabilizerSimulator::StabilizerSimulator(const StabilizerState& state) : n_(state.n) {
  StabilizerState checked = StabilizerState::from_generators(state.generators);
  stab_ = std::move(checked.generators);
  // Destabilizers: D_i anticommutes with S_i only, and commutes with the D_j
  // already placed. Solved qubit by qubit over GF(2).
  destab_.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    std::vector<uint64_t> constraints;
    uint64_t wanted = 0;
    for (int j = 0; j < n_; ++j) {
      constraints.push_back(sym_vec(stab_[j]));
      if (j == i) wanted |= 1ULL << (constraints.size() - 1);
    }
    for (int j = 0; j < i; ++j) constraints.push_back(sym_vec(destab_[j]));
    // Find v with <v, c_k> = wanted_k. Gaussian elimination over the 2n vars.
    const int dim = 2 * n_;
    std::vector<uint64_t> rows = constraints;
    std::vector<int> rhs(rows.size());
    for (size_t k = 0; k < rows.size(); ++k) rhs[k] = (wanted >> k) & 1;
    // Convert symplectic products to plain dot products: <v, c> uses swapped
    // halves of c.
    for (uint64_t& r : rows) {
      const uint64_t xm = (dim / 2 == 64) ? ~0ULL : ((1ULL << (dim / 2)) - 1);
      const uint64_t xs = r & xm, zs = (r >> (dim / 2)) & xm;
      r = zs | (xs << (dim / 2));
    }
    uint64_t v = 0;
    std::vector<uint64_t> work = rows;
    std::vector<int> wrhs = rhs;
    std::vector<int> pivot_col(work.size(), -1);
    size_t row = 0;
    for (int col = 0; col < dim && row < work.size(); ++col) {
      size_t piv = row;
      while (piv < work.size() && !((work[piv] >> col) & 1)) ++piv;
      if (piv == work.size()) continue;
      std::swap(work[row], work[piv]);
      std::swap(wrhs[row], wrhs[piv]);
      for (size_t k = 0; k < work.size(); ++k) {
        if (k != row && ((work[k] >> col) & 1)) {
          work[k] ^= work[row];
          wrhs[k] ^= wrhs[row];
        }
      }
      pivot_col[row] = col;
      ++row;
    }
    for (size_t k = row; k < work.size(); ++k)
      if (wrhs[k]) throw std::logic_error("destabilizer system inconsistent");
    for (size_t k = 0; k < row; ++k)
      if (wrhs[k]) v |= 1ULL << pivot_col[k];
    PauliString d(n_);
    for (int q = 0; q < n_; ++q)
      d.set_label(q, pauli_label((v >> q) & 1, (v >> (n_ + q)) & 1));
    destab_.push_back(std::move(d));
  }
}

void StabilizerSimulator::apply_gate1(const Gate1& g, int q) {
  for (PauliString& p : stab_) apply_gate1_to_pauli(g, q, p);
  for (PauliString& p : destab_) apply_gate1_to_pauli(g, q, p);
}

void StabilizerSimulator::apply_gate2(const Gate2& g, int q1, int q2) {
  for (PauliString& p : stab_) apply_gate2_to_pauli(g, q1, q2, p);
  for (PauliString& p : destab_) apply_gate2_to_pauli(g, q1, q2, p);
}

void StabilizerSimulator::apply_circuit(const BrickworkCircuit& c) {
  if (c.n != n_) throw std::invalid_argument("apply_circuit: size mismatch");
  const CliffordGroups& groups = CliffordGroups::instance();
  for (int q = 0; q < n_; ++q) apply_gate1(groups.gate1(c.layer0[q]), q);
  for (int l = 0; l < c.d; ++l) {
    const auto pairs = brickwork_pairs(n_, l + 1);
    for (int i = 0; i < n_ / 2; ++i)
      apply_gate2(groups.gate2(c.layers[l][i]), pairs[i].first, pairs[i].second);
  }
}

void StabilizerSimulator::apply_tableau(const CliffordTableau& t) {
  for (PauliString& p : stab_) p = t.conjugate(p);
  for (PauliString& p : destab_) p = t.conjugate(p);
}

int StabilizerSimulator::measure_z(int q, Rng& rng) {
  int p = -1;
  for (int i = 0; i < n_; ++i) {
    if (pauli_x_bit(stab_[i].label(q))) {
      p = i;
      break;
    }
  }
  if (p >= 0) {
    // Random branch. Update every other row that anticommutes with Z_q.
    const PauliString pivot = stab_[p];
    for (int i = 0; i < n_; ++i) {
      if (i != p && pauli_x_bit(stab_[i].label(q))) stab_[i] = pivot.times(stab_[i]);
      if (pauli_x_bit(destab_[i].label(q))) destab_[i] = pivot.times(destab_[i]);
    }
    destab_[p] = pivot;
    const int r = rng.next_bit();
    PauliString zq(n_);
    zq.set_label(q, kPauliZ);
    zq.set_phase(r ? 2 : 0);
    stab_[p] = zq;
    return r;
  }
  // Deterministic branch: +-Z_q is in the group; the destabilizers give the
  // expansion coefficients.
  PauliString acc(n_);
  for (int i = 0; i < n_; ++i)
    if (pauli_x_bit(destab_[i].label(q))) acc = acc.times(stab_[i]);
  if (!acc.is_z_type() || pauli_z_bit(acc.label(q)) != 1)
    throw std::logic_error("deterministic measurement reconstruction failed");
  return acc.sign() < 0 ? 1 : 0;
}

std::vector<uint8_t> StabilizerSimulator::measure_all(Rng& rng) {
  std::vector<uint8_t> bits(n_);
  for (int q = 0; q < n_; ++q) bits[q] = static_cast<uint8_t>(measure_z(q, rng));
  return bits;
}

}  // namespace brickshadows
