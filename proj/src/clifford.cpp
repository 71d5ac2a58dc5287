#include "brickshadows/clifford.hpp"

#include <complex>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace brickshadows {

namespace {

// Element of a small Clifford group during enumeration: images of the basis
// Paulis X_1, Z_1 (, X_2, Z_2) as labels plus sign bits.
struct SmallElement {
  int k;
  std::array<uint8_t, 4> img;
  std::array<uint8_t, 4> sgn;

  uint32_t key() const {
    uint32_t v = 0;
    for (int i = 0; i < 2 * k; ++i) v |= static_cast<uint32_t>(img[i]) << (4 * i);
    for (int i = 0; i < 2 * k; ++i) v |= static_cast<uint32_t>(sgn[i]) << (16 + i);
    return v;
  }
};

PauliString pauli_from_packed(int label, int k, int sign_bit) {
  std::vector<uint8_t> labels(k);
  for (int q = 0; q < k; ++q) labels[q] = (label >> (2 * q)) & 3;
  return PauliString(std::move(labels), sign_bit ? 2 : 0);
}

// Conjugate packed label `m` (with sign bit) through an element given by its
// basis images. Returns packed label and sign bit; asserts Hermiticity.
std::pair<int, int> conjugate_packed(const SmallElement& e, int m, int sign_bit) {
  const int k = e.k;
  int pre = 0;  // i-power from the Hermitian prefactors of the input label
  for (int q = 0; q < k; ++q) {
    const int g = (m >> (2 * q)) & 3;
    pre += pauli_x_bit(g) * pauli_z_bit(g);
  }
  PauliString acc(k);
  for (int q = 0; q < k; ++q) {
    const int g = (m >> (2 * q)) & 3;
    if (pauli_x_bit(g)) acc = acc.times(pauli_from_packed(e.img[2 * q], k, e.sgn[2 * q]));
    if (pauli_z_bit(g)) acc = acc.times(pauli_from_packed(e.img[2 * q + 1], k, e.sgn[2 * q + 1]));
  }
  int phase = (acc.phase() + pre + (sign_bit ? 2 : 0)) % 4;
  if (phase & 1) throw std::logic_error("conjugation produced a non-Hermitian Pauli");
  int out = 0;
  for (int q = 0; q < k; ++q) out |= acc.label(q) << (2 * q);
  return {out, phase == 2 ? 1 : 0};
}

SmallElement compose(const SmallElement& g, const SmallElement& e) {
  SmallElement r;
  r.k = e.k;
  for (int i = 0; i < 2 * e.k; ++i) {
    auto [lab, sg] = conjugate_packed(g, e.img[i], e.sgn[i]);
    r.img[i] = static_cast<uint8_t>(lab);
    r.sgn[i] = static_cast<uint8_t>(sg);
  }
  return r;
}

SmallElement identity_element(int k) {
  SmallElement e;
  e.k = k;
  e.sgn = {0, 0, 0, 0};
  if (k == 1) {
    e.img = {kPauliX, kPauliZ, 0, 0};
  } else {
    e.img = {static_cast<uint8_t>(pack2(kPauliX, kPauliI)),
             static_cast<uint8_t>(pack2(kPauliZ, kPauliI)),
             static_cast<uint8_t>(pack2(kPauliI, kPauliX)),
             static_cast<uint8_t>(pack2(kPauliI, kPauliZ))};
  }
  return e;
}

std::vector<SmallElement> make_generators(int k) {
  std::vector<SmallElement> gens;
  auto mk = [&](std::array<int, 4> img, std::array<int, 4> sgn) {
    SmallElement e;
    e.k = k;
    for (int i = 0; i < 4; ++i) {
      e.img[i] = static_cast<uint8_t>(img[i]);
      e.sgn[i] = static_cast<uint8_t>(sgn[i]);
    }
    gens.push_back(e);
  };
  if (k == 1) {
    mk({kPauliZ, kPauliX, 0, 0}, {0, 0, 0, 0});  // H
    mk({kPauliY, kPauliZ, 0, 0}, {0, 0, 0, 0});  // S
  } else {
    const int XI = pack2(kPauliX, kPauliI), ZI = pack2(kPauliZ, kPauliI);
    const int IX = pack2(kPauliI, kPauliX), IZ = pack2(kPauliI, kPauliZ);
    const int YI = pack2(kPauliY, kPauliI), IY = pack2(kPauliI, kPauliY);
    const int XX = pack2(kPauliX, kPauliX), ZZ = pack2(kPauliZ, kPauliZ);
    mk({ZI, XI, IX, IZ}, {0, 0, 0, 0});  // H on qubit 1
    mk({YI, ZI, IX, IZ}, {0, 0, 0, 0});  // S on qubit 1
    mk({XI, ZI, IZ, IX}, {0, 0, 0, 0});  // H on qubit 2
    mk({XI, ZI, IY, IZ}, {0, 0, 0, 0});  // S on qubit 2
    mk({XX, ZI, IX, ZZ}, {0, 0, 0, 0});  // CNOT 1 -> 2
  }
  return gens;
}

}  // namespace

CliffordGroups::CliffordGroups() {
  auto enumerate = [](int k, auto&& store, std::vector<Word>& words) {
    std::vector<SmallElement> gens = make_generators(k);
    std::vector<SmallElement> elements;
    std::unordered_map<uint32_t, int> seen;
    std::queue<int> todo;
    elements.push_back(identity_element(k));
    words.push_back({-1, -1});
    seen[elements[0].key()] = 0;
    todo.push(0);
    while (!todo.empty()) {
      const int at = todo.front();
      todo.pop();
      for (int gi = 0; gi < static_cast<int>(gens.size()); ++gi) {
        SmallElement nxt = compose(gens[gi], elements[at]);
        const uint32_t key = nxt.key();
        const int ni = static_cast<int>(elements.size());
        if (seen.emplace(key, ni).second) {
          elements.push_back(nxt);
          words.push_back({at, gi});
          todo.push(ni);
        }
      }
    }
    for (const SmallElement& e : elements) store(e);
    return elements.size();
  };

  auto store1 = [this](const SmallElement& e) {
    Gate1 g{};
    for (int m = 0; m < 4; ++m) {
      auto [lab, sg] = conjugate_packed(e, m, 0);
      g.perm[m] = static_cast<uint8_t>(lab);
      g.sign[m] = static_cast<int8_t>(sg ? -1 : 1);
    }
    for (int m = 0; m < 4; ++m) {
      g.inv_perm[g.perm[m]] = static_cast<uint8_t>(m);
      g.inv_sign[g.perm[m]] = g.sign[m];
    }
    gates1_.push_back(g);
  };
  auto store2 = [this](const SmallElement& e) {
    Gate2 g{};
    for (int m = 0; m < 16; ++m) {
      auto [lab, sg] = conjugate_packed(e, m, 0);
      g.perm[m] = static_cast<uint8_t>(lab);
      g.sign[m] = static_cast<int8_t>(sg ? -1 : 1);
    }
    for (int m = 0; m < 16; ++m) {
      g.inv_perm[g.perm[m]] = static_cast<uint8_t>(m);
      g.inv_sign[g.perm[m]] = g.sign[m];
    }
    gates2_.push_back(g);
  };

  const size_t n1 = enumerate(1, store1, words1_);
  const size_t n2 = enumerate(2, store2, words2_);
  if (n1 != 24 || n2 != 11520)
    throw std::logic_error("Clifford group enumeration produced the wrong order");
}

const CliffordGroups& CliffordGroups::instance() {
  static const CliffordGroups groups;
  return groups;
}

namespace {

Eigen::Matrix2cd generator_dense1(int gi) {
  using std::complex;
  Eigen::Matrix2cd m;
  if (gi == 0) {
    m << 1, 1, 1, -1;
    m /= std::sqrt(2.0);
  } else {
    m << 1, 0, 0, complex<double>(0, 1);
  }
  return m;
}

Eigen::Matrix4cd generator_dense2(int gi) {
  using Eigen::Matrix2cd;
  using Eigen::Matrix4cd;
  auto kron = [](const Matrix2cd& a, const Matrix2cd& b) {
    Matrix4cd r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return r;
  };
  const Matrix2cd eye = Matrix2cd::Identity();
  switch (gi) {
    case 0: return kron(generator_dense1(0), eye);
    case 1: return kron(generator_dense1(1), eye);
    case 2: return kron(eye, generator_dense1(0));
    case 3: return kron(eye, generator_dense1(1));
    default: {
      // CNOT 1 -> 2; qubit 1 owns the high-order bit of the basis index here,
      // matching pack2's "first gate qubit = low label bits" only through the
      // conjugation tests, which fix the convention.
      Matrix4cd cx = Matrix4cd::Zero();
      cx(0, 0) = 1;
      cx(1, 1) = 1;
      cx(2, 3) = 1;
      cx(3, 2) = 1;
      return cx;
    }
  }
}

}  // namespace

Eigen::Matrix2cd CliffordGroups::dense1(int idx) const {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  std::vector<int> gens;
  for (int at = idx; words1_[at].generator >= 0; at = words1_[at].parent)
    gens.push_back(words1_[at].generator);
  // word was collected innermost-last; elements compose as g_last * ... * g_first
  for (auto it = gens.rbegin(); it != gens.rend(); ++it) m = generator_dense1(*it) * m;
  return m;
}

Eigen::Matrix4cd CliffordGroups::dense2(int idx) const {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  std::vector<int> gens;
  for (int at = idx; words2_[at].generator >= 0; at = words2_[at].parent)
    gens.push_back(words2_[at].generator);
  for (auto it = gens.rbegin(); it != gens.rend(); ++it) m = generator_dense2(*it) * m;
  return m;
}

Eigen::MatrixXd CliffordGroups::kernel1() const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(4, 4);
  for (const Gate1& g : gates1_)
    for (int m = 0; m < 4; ++m) k(g.perm[m], m) += 1.0;
  return k / static_cast<double>(size1());
}

Eigen::MatrixXd CliffordGroups::kernel2() const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(16, 16);
  for (const Gate2& g : gates2_)
    for (int m = 0; m < 16; ++m) k(g.perm[m], m) += 1.0;
  return k / static_cast<double>(size2());
}

Eigen::MatrixXd CliffordGroups::joint_kernel1() const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(16, 16);
  for (const Gate1& g : gates1_)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) k(g.perm[a] * 4 + g.perm[b], a * 4 + b) += 1.0;
  return k / static_cast<double>(size1());
}

Eigen::MatrixXd CliffordGroups::joint_kernel2() const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(256, 256);
  for (const Gate2& g : gates2_)
    for (int a = 0; a < 16; ++a)
      for (int b = 0; b < 16; ++b) k(g.perm[a] * 16 + g.perm[b], a * 16 + b) += 1.0;
  return k / static_cast<double>(size2());
}

void apply_gate1_to_pauli(const Gate1& g, int q, PauliString& p, bool inverse) {
  const int m = p.label(q);
  const uint8_t nm = inverse ? g.inv_perm[m] : g.perm[m];
  const int sg = inverse ? g.inv_sign[m] : g.sign[m];
  p.set_label(q, nm);
  if (sg < 0) p.set_phase(p.phase() + 2);
}

void apply_gate2_to_pauli(const Gate2& g, int q1, int q2, PauliString& p, bool inverse) {
  const int m = pack2(p.label(q1), p.label(q2));
  const uint8_t nm = inverse ? g.inv_perm[m] : g.perm[m];
  const int sg = inverse ? g.inv_sign[m] : g.sign[m];
  p.set_label(q1, unpack2_first(nm));
  p.set_label(q2, unpack2_second(nm));
  if (sg < 0) p.set_phase(p.phase() + 2);
}

CliffordTableau::CliffordTableau(int n) : n_(n) {}

CliffordTableau CliffordTableau::identity(int n) {
  CliffordTableau t(n);
  t.x_img_.reserve(n);
  t.z_img_.reserve(n);
  for (int q = 0; q < n; ++q) {
    PauliString x(n), z(n);
    x.set_label(q, kPauliX);
    z.set_label(q, kPauliZ);
    t.x_img_.push_back(std::move(x));
    t.z_img_.push_back(std::move(z));
  }
  return t;
}

PauliString CliffordTableau::conjugate(const PauliString& p) const {
  if (p.num_qubits() != n_) throw std::invalid_argument("conjugate: size mismatch");
  PauliString acc(n_);
  int pre = 0;
  for (int q = 0; q < n_; ++q) {
    const int g = p.label(q);
    pre += pauli_x_bit(g) * pauli_z_bit(g);
    if (pauli_x_bit(g)) acc = acc.times(x_img_[q]);
    if (pauli_z_bit(g)) acc = acc.times(z_img_[q]);
  }
  acc.set_phase(acc.phase() + pre + p.phase());
  if (!acc.is_hermitian()) throw std::logic_error("tableau conjugation lost Hermiticity");
  return acc;
}

void CliffordTableau::push_gate1(const Gate1& g, int q) {
  for (int i = 0; i < n_; ++i) {
    apply_gate1_to_pauli(g, q, x_img_[i]);
    apply_gate1_to_pauli(g, q, z_img_[i]);
  }
}

void CliffordTableau::push_gate2(const Gate2& g, int q1, int q2) {
  for (int i = 0; i < n_; ++i) {
    apply_gate2_to_pauli(g, q1, q2, x_img_[i]);
    apply_gate2_to_pauli(g, q1, q2, z_img_[i]);
  }
}

CliffordTableau CliffordTableau::then(const CliffordTableau& second) const {
  if (second.n_ != n_) throw std::invalid_argument("then: size mismatch");
  CliffordTableau out(n_);
  for (int q = 0; q < n_; ++q) {
    out.x_img_.push_back(second.conjugate(x_img_[q]));
    out.z_img_.push_back(second.conjugate(z_img_[q]));
  }
  return out;
}

namespace {

// 2n-bit symplectic vector of a Pauli: x bits low, z bits high.
uint64_t pauli_vec(const PauliString& p) {
  uint64_t v = 0;
  const int n = p.num_qubits();
  for (int q = 0; q < n; ++q) {
    if (pauli_x_bit(p.label(q))) v |= 1ULL << q;
    if (pauli_z_bit(p.label(q))) v |= 1ULL << (n + q);
  }
  return v;
}

PauliString pauli_from_vec(uint64_t v, int n) {
  PauliString p(n);
  for (int q = 0; q < n; ++q) {
    const int x = (v >> q) & 1;
    const int z = (v >> (n + q)) & 1;
    p.set_label(q, pauli_label(x, z));
  }
  return p;
}

int symplectic_product(uint64_t u, uint64_t v, int n) {
  const uint64_t xmask = (n == 64) ? ~0ULL : ((1ULL << n) - 1);
  const uint64_t ux = u & xmask, uz = (u >> n) & xmask;
  const uint64_t vx = v & xmask, vz = (v >> n) & xmask;
  return __builtin_popcountll((ux & vz) ^ (uz & vx)) & 1;
}

// Solve M w = target over GF(2) where columns of M are `cols`. Returns the
// combination mask, or throws when inconsistent.
uint64_t gf2_solve(std::vector<uint64_t> cols, uint64_t target, int dim) {
  const int nc = static_cast<int>(cols.size());
  std::vector<uint64_t> combo(nc);
  for (int i = 0; i < nc; ++i) combo[i] = 1ULL << i;
  uint64_t target_combo = 0;
  int row = 0;
  for (int bit = 0; bit < dim && row < nc; ++bit) {
    int pivot = -1;
    for (int i = row; i < nc; ++i) {
      if ((cols[i] >> bit) & 1) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(cols[row], cols[pivot]);
    std::swap(combo[row], combo[pivot]);
    for (int i = 0; i < nc; ++i) {
      if (i != row && ((cols[i] >> bit) & 1)) {
        cols[i] ^= cols[row];
        combo[i] ^= combo[row];
      }
    }
    if ((target >> bit) & 1) {
      target ^= cols[row];
      target_combo ^= combo[row];
    }
    ++row;
  }
  if (target != 0) throw std::logic_error("gf2_solve: inconsistent system");
  return target_combo;
}

}  // namespace

CliffordTableau CliffordTableau::inverse() const {
  std::vector<uint64_t> cols(2 * n_);
  for (int q = 0; q < n_; ++q) {
    cols[q] = pauli_vec(x_img_[q]);
    cols[n_ + q] = pauli_vec(z_img_[q]);
  }
  CliffordTableau out = identity(n_);
  auto solve_one = [&](uint64_t target) {
    // Column i of the symplectic matrix is the image of basis Pauli i, so the
    // solution mask is exactly the preimage vector.
    const uint64_t mask = gf2_solve(cols, target, 2 * n_);
    PauliString cand = pauli_from_vec(mask, n_);
    const PauliString image = conjugate(cand);
    cand.set_phase(cand.phase() + image.phase());  // phases are 0/2, self-inverse
    return cand;
  };
  for (int q = 0; q < n_; ++q) {
    PauliString ex(n_), ez(n_);
    ex.set_label(q, kPauliX);
    ez.set_label(q, kPauliZ);
    out.x_img_[q] = solve_one(pauli_vec(ex));
    out.z_img_[q] = solve_one(pauli_vec(ez));
  }
  return out;
}

bool CliffordTableau::is_valid() const {
  for (int q = 0; q < n_; ++q) {
    if (!x_img_[q].is_hermitian() || !z_img_[q].is_hermitian()) return false;
    if (x_img_[q].commutes_with(z_img_[q])) return false;
    for (int r = 0; r < n_; ++r) {
      if (r == q) continue;
      if (!x_img_[q].commutes_with(x_img_[r])) return false;
      if (!x_img_[q].commutes_with(z_img_[r])) return false;
      if (!z_img_[q].commutes_with(z_img_[r])) return false;
    }
  }
  return true;
}

CliffordTableau random_clifford_tableau(int n, Rng& rng) {
  if (n < 1 || n > 30) throw std::invalid_argument("random_clifford_tableau: bad n");
  // Basis of the symplectic complement of everything chosen so far.
  std::vector<uint64_t> basis(2 * n);
  for (int i = 0; i < 2 * n; ++i) basis[i] = 1ULL << i;
  CliffordTableau t = CliffordTableau::identity(n);

  auto draw_from_span = [&](auto&& accept) {
    while (true) {
      uint64_t v = 0;
      for (uint64_t b : basis)
        if (rng.next_bit()) v ^= b;
      if (accept(v)) return v;
    }
  };

  for (int q = 0; q < n; ++q) {
    const uint64_t xv = draw_from_span([](uint64_t v) { return v != 0; });
    const uint64_t zv =
        draw_from_span([&](uint64_t v) { return symplectic_product(xv, v, n) == 1; });
    PauliString xi = pauli_from_vec(xv, n);
    PauliString zi = pauli_from_vec(zv, n);
    if (rng.next_bit()) xi.set_phase(2);
    if (rng.next_bit()) zi.set_phase(2);
    t.x_image(q) = xi;
    t.z_image(q) = zi;

    // Symplectic Gram-Schmidt: project the remaining basis off (xv, zv).
    std::vector<uint64_t> next;
    for (uint64_t b : basis) {
      uint64_t c = b;
      if (symplectic_product(c, zv, n)) c ^= xv;
      if (symplectic_product(c, xv, n)) c ^= zv;
      if (c) next.push_back(c);
    }
    // Reduce to an independent set by leading-bit elimination.
    std::vector<uint64_t> reduced;
    for (uint64_t v : next) {
      uint64_t r = v;
      for (uint64_t p : reduced) {
        const uint64_t lb = 1ULL << (63 - __builtin_clzll(p));
        if (r & lb) r ^= p;
      }
      if (r) reduced.push_back(r);
    }
    basis = std::move(reduced);
  }
  if (!t.is_valid()) throw std::logic_error("random tableau failed validity check");
  return t;
}

}  // namespace brickshadows
