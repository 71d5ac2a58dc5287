#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "brickshadows/channel.hpp"
#include "brickshadows/inverse.hpp"
#include "brickshadows/markov.hpp"
#include "brickshadows/norms.hpp"
#include "brickshadows/shadows.hpp"
#include "dense_reference.hpp"

using namespace brickshadows;
using dense_ref::Mat;

namespace {

size_t pair_index(uint64_t ka, uint64_t kb, int n) {
  size_t idx = 0;
  for (int q = n - 1; q >= 0; --q) {
    const int m = static_cast<int>(4 * ((ka >> (2 * q)) & 3) + ((kb >> (2 * q)) & 3));
    idx = idx * 16 + m;
  }
  return idx;
}

SparseObservable random_observable(int n, int terms, uint64_t seed) {
  SparseObservable obs(n);
  Rng rng(seed, 0);
  for (int k = 0; k < terms; ++k) {
    PauliString p(n);
    int w = 0;
    for (int q = 0; q < n; ++q) {
      const int g = static_cast<int>(rng.next_below(4));
      p.set_label(q, g);
      w += g != 0;
    }
    if (w == 0) p.set_label(0, kPauliZ);
    obs.add(std::move(p), rng.next_symmetric(1.0));
  }
  return obs;
}

}  // namespace

TEST_CASE("single-string norms hit the closed-form anchors") {
  const EigenvalueMPS t1 = build_t_mps(2, 1);
  CHECK(pauli_norm_sq(PauliString::parse("ZI"), 1, &t1) == doctest::Approx(5.0));
  CHECK(pauli_norm_sq(PauliString::parse("ZZZZ"), 0) == doctest::Approx(81.0));
  CHECK(pauli_norm_sq(PauliString::parse("ZZZZ"), kDepthInfinite) == doctest::Approx(17.0));
  CHECK_THROWS_AS(pauli_norm_sq(PauliString(4), 0), std::invalid_argument);
}

TEST_CASE("state-dependent norm matches a dense pair-table oracle") {
  const int n = 4, dim = 1 << n;
  const SparseObservable obs = random_observable(n, 6, 31);
  const StabilizerState ghz = StabilizerState::ghz(n);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = psi(dim - 1) = 1.0 / std::sqrt(2.0);
  const Mat sigma = psi * psi.adjoint();

  for (int d = 0; d <= 2; ++d) {
    const Eigen::VectorXd ts = DenseMarkovOracle::all_eigenvalues(n, d);
    const Eigen::VectorXd taus = DenseMarkovOracle::all_pair_values(n, d);
    double dense_norm = 0.0;
    for (int j = 0; j < obs.size(); ++j)
      for (int k = 0; k < obs.size(); ++k) {
        const uint64_t ka = obs.paulis[j].label_key();
        const uint64_t kb = obs.paulis[k].label_key();
        const std::complex<double> tr = (sigma * dense_ref::pauli_string_mat(obs.paulis[j]) *
                                         dense_ref::pauli_string_mat(obs.paulis[k]))
                                            .trace();
        dense_norm += obs.coeffs[j] * obs.coeffs[k] * taus(pair_index(ka, kb, n)) /
                      (ts(ka) * ts(kb)) * tr.real();
      }

    const double exact = state_dep_norm_sq_exact(obs, ghz, d);
    CAPTURE(d);
    CHECK(exact == doctest::Approx(dense_norm).epsilon(1e-9));

    const MonteCarloNorm mc = mc_state_dep_norm_sq(obs, ghz, d, 555 + d, 20000);
    CHECK(std::abs(mc.mean - exact) < 4 * mc.std_error + 1e-9);
  }
}

TEST_CASE("projector norm via the stabilizer group equals the state evaluation") {
  const int n = 4;
  const StabilizerState ghz = StabilizerState::ghz(n);
  for (int d = 1; d <= 2; ++d) {
    const double via_pairs = stabilizer_projector_norm_sq(ghz.generators, d);
    const double via_state = state_dep_norm_sq_exact(ghz_projector_terms(n), ghz, d);
    CAPTURE(d);
    CHECK(via_pairs == doctest::Approx(via_state).epsilon(1e-9));
  }
}

TEST_CASE("cross-term bound parts match a dense operator built from the same inverse") {
  const int n = 4, dim = 1 << n;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = psi(dim - 1) = 1.0 / std::sqrt(2.0);
  const Mat sigma = psi * psi.adjoint();

  for (int d = 0; d <= 2; ++d) {
    PeriodicMPS inv_lift;
    if (d == 0) {
      inv_lift = lift_depth0(n, true);
    } else {
      InversionConfig cfg;
      cfg.stages = {{1, 120}};
      const InversionResult ir = invert(build_t_mps(n, d), cfg);
      inv_lift = lift_to_pauli_mps(ir.inverse, n);
    }
    // the bond-4 projector fits the contraction budget through depth 1; use a
    // product operator at depth 2 where the pair cell alone carries bond 16
    PeriodicMPS obs_mps;
    if (d < 2) {
      obs_mps = ghz_projector_mps(n);
    } else {
      Rng rng(77, 0);
      std::vector<std::vector<double>> site_vals(n);
      for (int q = 0; q < n; ++q)
        for (int g = 0; g < 4; ++g) site_vals[q].push_back(rng.next_symmetric(1.0));
      obs_mps = PeriodicMPS::product(site_vals);
    }
    const FrobeniusBound fb = frobenius_norm_bound(obs_mps, inv_lift, d);

    const Eigen::VectorXd ts = DenseMarkovOracle::all_eigenvalues(n, d);
    const Eigen::VectorXd taus = DenseMarkovOracle::all_pair_values(n, d);
    const auto labels_of = [&](uint64_t key) {
      std::vector<uint8_t> l(n);
      for (int q = 0; q < n; ++q) l[q] = (key >> (2 * q)) & 3;
      return l;
    };
    std::vector<double> beta(256), vw(256);
    for (uint64_t key = 0; key < 256; ++key) {
      beta[key] = obs_mps.evaluate(labels_of(key));
      vw[key] = inv_lift.evaluate(labels_of(key));
    }
    Mat cross_full = Mat::Zero(dim, dim);
    double ls_dense = 0.0, diag_dense = 0.0, ev2_dense = 0.0;
    for (uint64_t ka = 0; ka < 256; ++ka) {
      if (beta[ka] == 0.0) continue;
      const PauliString pa = PauliString::from_label_key(ka, n);
      ls_dense += beta[ka] * beta[ka] * vw[ka];
      diag_dense += beta[ka] * beta[ka] * vw[ka] * vw[ka] * ts(ka);
      for (uint64_t kb = 0; kb < 256; ++kb) {
        if (beta[kb] == 0.0) continue;
        const PauliString pb = PauliString::from_label_key(kb, n);
        const Mat pp = dense_ref::pauli_string_mat(pa) * dense_ref::pauli_string_mat(pb);
        const double w = beta[ka] * beta[kb] * vw[ka] * vw[kb] * taus(pair_index(ka, kb, n));
        cross_full += w * pp;
        ev2_dense += w * (sigma * pp).trace().real();
      }
    }
    const double full_sq = (cross_full.adjoint() * cross_full).trace().real();
    const double cross_sq = full_sq - dim * diag_dense * diag_dense;

    CAPTURE(d);
    CHECK(fb.ls_sq == doctest::Approx(ls_dense).epsilon(1e-9));
    CHECK(fb.diag_sq == doctest::Approx(diag_dense).epsilon(1e-9));
    CHECK(fb.cross_frob_sq == doctest::Approx(cross_sq).epsilon(1e-9));
    CHECK(ev2_dense <= fb.bound_sq * (1 + 1e-9) + 1e-9);
  }

  // the guard refuses contractions whose cross bond would blow up: the bond-4
  // projector at depth 2 would need bond 512
  CHECK_THROWS_AS(frobenius_norm_bound(ghz_projector_mps(n), lift_depth0(n, true), 2),
                  std::invalid_argument);
}

TEST_CASE("analytic eigenvalue lower bound and its domain") {
  CHECK(eigenvalue_bound_min_depth(10, 1.5, 1.0) == 8);
  const double b = eigenvalue_lower_bound(10, 8, 10, 1.5, 1.0);
  CHECK(b > 0);
  CHECK(b < 1.0 / 1025.0);
  CHECK_THROWS_AS(eigenvalue_lower_bound(10, 7, 10, 1.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(eigenvalue_lower_bound(10, 8, 10, 0.9, 1.0), std::domain_error);
}

TEST_CASE("least-squares norm routes agree and the triangle bound dominates") {
  const int n = 4;
  const EigenvalueMPS t = build_t_mps(n, 1);
  const SparseObservable terms = ghz_projector_terms(n);
  const double sparse_ls = ls_norm_sq(terms, 1, &t);
  InversionConfig cfg;
  const InversionResult ir = invert(t, cfg);
  const double mps_ls = ls_norm_sq(ghz_projector_mps(n), lift_to_pauli_mps(ir.inverse, n));
  CHECK(sparse_ls == doctest::Approx(mps_ls).epsilon(1e-5));

  const double tri = sparse_norm_bound_sq(terms, 1, &t);
  CHECK(tri + 1e-12 >= sparse_ls);
}

TEST_CASE("norm reports serialize their identifying fields") {
  NormReport r;
  r.kind = "ls";
  r.n = 6;
  r.d = 2;
  r.value_sq = 3.25;
  const std::string text = r.to_json();
  CHECK(text.find("\"kind\"") != std::string::npos);
  CHECK(text.find("\"ls\"") != std::string::npos);
  CHECK(text.find("\"value_sq\"") != std::string::npos);
}
