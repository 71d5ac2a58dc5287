#include "brickshadows/norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace brickshadows {

namespace {

// labels -> summed coefficients, so repeated terms behave like one term
std::map<uint64_t, double> merged_terms(const SparseObservable& obs) {
  if (obs.n > 32) throw std::invalid_argument("norms: label packing supports up to 32 qubits");
  std::map<uint64_t, double> m;
  for (int k = 0; k < obs.size(); ++k) m[obs.paulis[k].label_key()] += obs.coeffs[k];
  return m;
}

// holds a caller-provided eigenvalue MPS or builds one on demand
struct EigenvalueSource {
  EigenvalueSource(int n, int d, const EigenvalueMPS* t) : mps(t) {
    if (mps == nullptr && d >= 1) {
      local = std::make_unique<EigenvalueMPS>(build_t_mps(n, d));
      mps = local.get();
    }
  }
  double operator()(const PauliString& p, int d) const { return t_value(p, d, mps); }

  const EigenvalueMPS* mps;
  std::unique_ptr<EigenvalueMPS> local;
};

struct PairSource {
  PairSource(int n, int d, const PairEigenvalueMPS* m) : mps(m) {
    if (mps == nullptr && d >= 1) {
      local = std::make_unique<PairEigenvalueMPS>(build_tau_mps(n, d));
      mps = local.get();
    }
  }
  double operator()(const PauliString& a, const PauliString& b, int d) const {
    return tau_value(a, b, d, mps);
  }

  const PairEigenvalueMPS* mps;
  std::unique_ptr<PairEigenvalueMPS> local;
};

std::unordered_map<uint64_t, double> stabilizer_group_map(const StabilizerState& st) {
  const int n = st.n;
  if (n < 1 || n > 16)
    throw std::invalid_argument("stabilizer group enumeration supports 1 to 16 qubits");
  if (static_cast<int>(st.generators.size()) != n)
    throw std::invalid_argument("stabilizer expectation needs a pure state (n generators)");
  std::unordered_map<uint64_t, double> m;
  m.reserve(1u << n);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    PauliString p(n);
    for (int g = 0; g < n; ++g)
      if ((mask >> g) & 1) p = p.times(st.generators[g]);
    m[p.label_key()] = p.sign();
  }
  return m;
}

}  // namespace

double pauli_norm_sq(const PauliString& p, int d, const EigenvalueMPS* t) {
  if (p.is_identity())
    throw std::invalid_argument("pauli_norm_sq: the identity needs no samples");
  return 1.0 / t_value(p, d, t);
}

double ls_norm_sq(const SparseObservable& obs, int d, const EigenvalueMPS* t) {
  const EigenvalueSource tv(obs.n, d, t);
  double s = 0.0;
  for (const auto& [key, beta] : merged_terms(obs))
    s += beta * beta / tv(PauliString::from_label_key(key, obs.n), d);
  return s;
}

double ls_norm_sq(const PeriodicMPS& observable, const PeriodicMPS& inverse_lifted) {
  const PeriodicMPS* factors[] = {&observable, &observable, &inverse_lifted};
  return PeriodicMPS::sum_product(factors);
}

double sparse_norm_bound_sq(const SparseObservable& obs, int d, const EigenvalueMPS* t) {
  const EigenvalueSource tv(obs.n, d, t);
  double s = 0.0;
  for (const auto& [key, beta] : merged_terms(obs))
    s += std::abs(beta) / std::sqrt(tv(PauliString::from_label_key(key, obs.n), d));
  return s * s;
}

double stabilizer_expectation(const StabilizerState& state, const PauliString& p) {
  if (p.num_qubits() != state.n)
    throw std::invalid_argument("stabilizer_expectation: qubit count mismatch");
  if (!p.is_hermitian())
    throw std::invalid_argument("stabilizer_expectation: non-Hermitian operator");
  const auto group = stabilizer_group_map(state);
  const auto it = group.find(p.label_key());
  return it == group.end() ? 0.0 : p.sign() * it->second;
}

double state_dep_norm_sq_exact(const SparseObservable& obs, const StabilizerState& sigma, int d) {
  if (obs.n != sigma.n) throw std::invalid_argument("state_dep_norm_sq: qubit count mismatch");
  const int n = obs.n;
  const EigenvalueSource tv(n, d, nullptr);
  const PairSource tauv(n, d, nullptr);
  const auto group = stabilizer_group_map(sigma);

  const auto terms = merged_terms(obs);
  std::vector<PauliString> ps;
  std::vector<double> betas, inv_t;
  for (const auto& [key, beta] : terms) {
    ps.push_back(PauliString::from_label_key(key, n));
    betas.push_back(beta);
    inv_t.push_back(1.0 / tv(ps.back(), d));
  }

  double total = 0.0;
  for (size_t j = 0; j < ps.size(); ++j) {
    total += betas[j] * betas[j] * inv_t[j];
    for (size_t k = 0; k < ps.size(); ++k) {
      if (j == k) continue;
      if (!ps[j].commutes_with(ps[k])) continue;  // pair probability vanishes
      const PauliString prod = ps[j].times(ps[k]);
      const auto it = group.find(prod.label_key());
      if (it == group.end()) continue;
      const double expect = prod.sign() * it->second;
      total += betas[j] * betas[k] * inv_t[j] * inv_t[k] * tauv(ps[j], ps[k], d) * expect;
    }
  }
  return total;
}

MonteCarloNorm mc_state_dep_norm_sq(const SparseObservable& obs, const StabilizerState& sigma,
                                    int d, uint64_t seed, int shots, const EigenvalueMPS* t) {
  if (shots < 2) throw std::invalid_argument("mc_state_dep_norm_sq: need at least 2 shots");
  const auto snaps = acquire(sigma, d, seed, shots);
  const EigenvalueSource tv(obs.n, d, t);

  std::vector<double> inv_t(obs.size());
  for (int k = 0; k < obs.size(); ++k) inv_t[k] = 1.0 / tv(obs.paulis[k], d);

  MonteCarloNorm out;
  out.shots = shots;
  std::vector<double> sq(snaps.size());
  for (size_t i = 0; i < snaps.size(); ++i) {
    const CliffordTableau tab = snapshot_tableau(snaps[i]);
    double v = 0.0;
    for (int k = 0; k < obs.size(); ++k) {
      const int e = tab.conjugate(obs.paulis[k]).basis_expectation(snaps[i].bits);
      if (e != 0) v += obs.coeffs[k] * inv_t[k] * e;
    }
    sq[i] = v * v;
    out.mean += sq[i];
  }
  out.mean /= shots;
  double ss = 0.0;
  for (double s : sq) ss += (s - out.mean) * (s - out.mean);
  out.std_error = std::sqrt(ss / (static_cast<double>(shots) - 1.0) / shots);
  return out;
}

double stabilizer_projector_norm_sq(const std::vector<PauliString>& generators, int d,
                                    const EigenvalueMPS* t, const PairEigenvalueMPS* tau) {
  const int k = static_cast<int>(generators.size());
  if (k < 1 || k > 8)
    throw std::invalid_argument("stabilizer_projector_norm_sq: 1 to 8 generators supported");
  const int n = generators.front().num_qubits();
  for (const PauliString& g : generators) {
    if (g.num_qubits() != n)
      throw std::invalid_argument("stabilizer_projector_norm_sq: qubit count mismatch");
    if (!g.is_hermitian() || g.is_identity())
      throw std::invalid_argument("stabilizer_projector_norm_sq: bad generator");
  }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (!generators[a].commutes_with(generators[b]))
        throw std::invalid_argument("stabilizer_projector_norm_sq: generators must commute");

  std::vector<PauliString> group;
  group.reserve(1u << k);
  for (uint32_t mask = 0; mask < (1u << k); ++mask) {
    PauliString p(n);
    for (int g = 0; g < k; ++g)
      if ((mask >> g) & 1) p = p.times(generators[g]);
    if (p.is_identity() && p.sign() < 0)
      throw std::invalid_argument("stabilizer_projector_norm_sq: group contains minus identity");
    group.push_back(std::move(p));
  }
  for (size_t a = 0; a < group.size(); ++a)
    for (size_t b = a + 1; b < group.size(); ++b)
      if (group[a].equals_up_to_sign(group[b]))
        throw std::invalid_argument("stabilizer_projector_norm_sq: generators are dependent");

  const EigenvalueSource tv(n, d, t);
  const PairSource tauv(n, d, tau);
  std::vector<double> inv_t(group.size());
  for (size_t a = 0; a < group.size(); ++a) inv_t[a] = 1.0 / tv(group[a], d);

  double total = 0.0;
  for (size_t a = 0; a < group.size(); ++a) {
    total += inv_t[a];  // diagonal: tau(a, a) = t(a)
    for (size_t b = a + 1; b < group.size(); ++b)
      total += 2.0 * tauv(group[a], group[b], d) * inv_t[a] * inv_t[b];
  }
  return std::ldexp(total, -2 * k);
}

FrobeniusBound frobenius_norm_bound(const PeriodicMPS& observable,
                                    const PeriodicMPS& inverse_lifted, int d) {
  const int n = observable.num_sites();
  if (inverse_lifted.num_sites() != n)
    throw std::invalid_argument("frobenius_norm_bound: factor site counts disagree");
  for (int j = 0; j < n; ++j)
    if (observable.phys_dim(j) != 4 || inverse_lifted.phys_dim(j) != 4)
      throw std::invalid_argument("frobenius_norm_bound: factors must have one Pauli label per site");
  if (d < 0 || d > 2)
    throw std::invalid_argument(
        "frobenius_norm_bound: exact contraction supported for depths 0 to 2");

  FrobeniusBound out;
  out.ls_sq = ls_norm_sq(observable, inverse_lifted);

  // Cross-term operator over joint labels (g, g') of two Pauli expansions,
  // contracted one brick pair at a time: the pair-probability cell keeps bond
  // 16^{d-1} there, while a per-qubit split would inflate it sixteenfold and
  // squaring for the Frobenius norm would then be hopeless.
  SiteTensor cell;  // 256 slices indexed m_first * 16 + m_second, m = 4g + g'
  if (d == 0) {
    const Eigen::VectorXd w = pair_site_kernel().transpose() * pair_terminal();
    cell.assign(256, Eigen::MatrixXd::Zero(1, 1));
    for (int m1 = 0; m1 < 16; ++m1)
      for (int m2 = 0; m2 < 16; ++m2) cell[m1 * 16 + m2](0, 0) = w(m1) * w(m2);
  } else {
    cell = build_brickwork_cell(d, 16, pair_gate_kernel(), pair_terminal());
  }

  Eigen::Matrix2d rot[4];
  rot[0] = Eigen::Matrix2d::Identity();
  rot[1] << 0, -1, 1, 0;
  rot[2] = -rot[0];
  rot[3] = -rot[1];
  Eigen::Matrix2d cap = Eigen::Matrix2d::Zero();
  cap(0, 0) = 1.0;  // closes the phase register to Re(i^{sum of phases})

  // grouped[u] at pair j collects every ordered (lambda, lambda') whose
  // product carries pair label u, weighted by beta beta' v v' tau and the
  // commutation sign from the capped quarter-turn register
  std::vector<SiteTensor> grouped(n / 2);
  for (int j = 0; j < n / 2; ++j) {
    SiteTensor s(16);
    for (int m1 = 0; m1 < 16; ++m1) {
      const int g1 = m1 >> 2, h1 = m1 & 3;
      for (int m2 = 0; m2 < 16; ++m2) {
        const int g2 = m2 >> 2, h2 = m2 & 3;
        const Eigen::MatrixXd beta =
            observable.site(2 * j)[g1] * observable.site(2 * j + 1)[g2];
        const Eigen::MatrixXd betap =
            observable.site(2 * j)[h1] * observable.site(2 * j + 1)[h2];
        const Eigen::MatrixXd v =
            inverse_lifted.site(2 * j)[g1] * inverse_lifted.site(2 * j + 1)[g2];
        const Eigen::MatrixXd vp =
            inverse_lifted.site(2 * j)[h1] * inverse_lifted.site(2 * j + 1)[h2];
        Eigen::MatrixXd ph = rot[pauli_product_phase(g1, h1)] * rot[pauli_product_phase(g2, h2)];
        if (j == 0) ph = cap * ph;
        const Eigen::MatrixXd* factors[] = {&beta, &betap, &v, &vp, &cell[m1 * 16 + m2], &ph};
        Eigen::MatrixXd k = *factors[0];
        for (int f = 1; f < 6; ++f) {
          const Eigen::MatrixXd& B = *factors[f];
          Eigen::MatrixXd nk(k.rows() * B.rows(), k.cols() * B.cols());
          for (Eigen::Index r = 0; r < k.rows(); ++r)
            for (Eigen::Index c = 0; c < k.cols(); ++c)
              nk.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = k(r, c) * B;
          k = std::move(nk);
        }
        const int u = ((g1 ^ h1) << 2) | (g2 ^ h2);
        if (s[u].size() == 0)
          s[u] = std::move(k);
        else
          s[u] += k;
      }
    }
    grouped[j] = std::move(s);
  }
  const PeriodicMPS cross_full(std::move(grouped));
  if (cross_full.max_bond() > 96)
    throw std::invalid_argument(
        "frobenius_norm_bound: cross-term bond " + std::to_string(cross_full.max_bond()) +
        " exceeds the exact-contraction budget; lower the factor bonds or the depth");

  // the all-identity coefficient is the exact diagonal weight sum beta^2 v^2 t
  out.diag_sq = cross_full.evaluate(std::vector<uint8_t>(n / 2, 0));
  const double full_frob_sq = std::ldexp(cross_full.frobenius_sq(), n);
  out.cross_frob_sq = full_frob_sq - std::ldexp(out.diag_sq * out.diag_sq, n);
  out.bound_sq = out.diag_sq + std::sqrt(std::max(out.cross_frob_sq, 0.0));
  return out;
}

int eigenvalue_bound_min_depth(int n, double alpha, double c) {
  if (alpha <= 1.0 || c <= 0.0)
    throw std::domain_error("eigenvalue bound: needs alpha > 1 and c > 0");
  return static_cast<int>(
      std::ceil((alpha * std::log(static_cast<double>(n)) + std::log(1.0 / c)) /
                std::log(25.0 / 16.0)));
}

double eigenvalue_lower_bound(int n, int d, int support_extent, double alpha, double c) {
  if (alpha <= 1.0 || c <= 0.0)
    throw std::domain_error("eigenvalue bound: needs alpha > 1 and c > 0");
  if (n < 2) throw std::domain_error("eigenvalue bound: needs n >= 2");
  const double n_min = std::pow(25.0 * c / 18.0, 1.0 / (alpha - 1.0));
  if (static_cast<double>(n) <= n_min)
    throw std::domain_error("eigenvalue bound: n must exceed (25c/18)^{1/(alpha-1)}");
  if (d < eigenvalue_bound_min_depth(n, alpha, c))
    throw std::domain_error("eigenvalue bound: depth below the validity threshold");
  if (support_extent < 0 || support_extent > n)
    throw std::domain_error("eigenvalue bound: bad support extent");

  const int exponent = std::min(support_extent + 2 * d, n);
  const double limit = 1.0 / (std::ldexp(1.0, exponent) + 1.0);
  const double correction =
      1.0 + (16.0 / 25.0) / ((18.0 / (25.0 * c)) * std::pow(static_cast<double>(n), alpha - 1.0) -
                             1.0);
  return limit / correction;
}

std::string NormReport::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["n"] = n;
  j["d"] = d;
  j["value_sq"] = value_sq;
  return j.dump();
}

}  // namespace brickshadows
