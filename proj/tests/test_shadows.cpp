#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "brickshadows/channel.hpp"
#include "brickshadows/inverse.hpp"
#include "brickshadows/shadows.hpp"
#include "dense_reference.hpp"

using namespace brickshadows;
using dense_ref::Mat;

TEST_CASE("snapshot coefficient MPS matches a dense reconstruction") {
  const int n = 4;
  const StabilizerState ghz = StabilizerState::ghz(n);
  for (int d = 1; d <= 3; ++d) {
    const auto snaps = acquire(ghz, d, 42 + d, 3);
    double worst = 0.0, worst_val = 0.0;
    for (const Snapshot& s : snaps) {
      const Mat u = dense_ref::circuit_unitary(snapshot_circuit(s));
      int b_index = 0;
      for (int q = 0; q < n; ++q) b_index |= s.bits[q] << q;
      Mat proj = Mat::Zero(1 << n, 1 << n);
      proj(b_index, b_index) = 1.0;
      const Mat sigma = u.adjoint() * proj * u;

      const PeriodicMPS mps = snapshot_to_pauli_mps(s);
      for (int key = 0; key < (1 << (2 * n)); ++key) {
        const PauliString p = PauliString::from_label_key(key, n);
        const std::complex<double> tr = (sigma * dense_ref::pauli_string_mat(p)).trace();
        REQUIRE(std::abs(tr.imag()) < 1e-12);
        const double want = tr.real() / (1 << n);
        std::vector<int> idx(n);
        for (int q = 0; q < n; ++q) idx[q] = p.label(q);
        worst = std::max(worst, std::abs(mps.evaluate(idx) - want));
        if (p.weight() > 0 && key % 51 == 3)
          worst_val = std::max(worst_val, std::abs(snapshot_pauli_value(s, p) - tr.real()));
      }
    }
    CAPTURE(d);
    CHECK(worst < 1e-12);
    CHECK(worst_val < 1e-12);
  }
}

TEST_CASE("records replay deterministically and round trip through json") {
  const int n = 6;
  const StabilizerState zero = StabilizerState::zero(n);
  const auto snaps = acquire(zero, 2, 99, 5, 17);
  const auto again = acquire(zero, 2, 99, 5, 17);
  for (int i = 0; i < 5; ++i) CHECK(snaps[i].to_json_line() == again[i].to_json_line());
  CHECK(snaps[0].stream == 17);
  CHECK(snaps[4].stream == 21);

  std::stringstream buf;
  write_snapshots(buf, snaps);
  const auto back = read_snapshots(buf);
  REQUIRE(back.size() == snaps.size());
  const PauliString probe = PauliString::parse("XZIYZX");
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].to_json_line() == snaps[i].to_json_line());
    CHECK(snapshot_pauli_value(back[i], probe) == snapshot_pauli_value(snaps[i], probe));
  }

  // a record may spell its gates out instead of relying on the seed
  Snapshot ex = snaps[2];
  ex.explicit_gates = true;
  ex.circuit = snapshot_circuit(snaps[2]);
  const Snapshot ex2 = Snapshot::from_json_line(ex.to_json_line());
  CHECK(ex2.explicit_gates);
  CHECK(snapshot_pauli_value(ex2, probe) == snapshot_pauli_value(snaps[2], probe));
}

TEST_CASE("uniform-Clifford records replay but refuse the label MPS") {
  const StabilizerState zero = StabilizerState::zero(6);
  const PauliString probe = PauliString::parse("XZIYZX");
  const auto inf = acquire(zero, kDepthInfinite, 5, 4);
  for (const Snapshot& s : inf) {
    const Snapshot rt = Snapshot::from_json_line(s.to_json_line());
    CHECK(snapshot_pauli_value(rt, probe) == snapshot_pauli_value(s, probe));
  }
  CHECK_THROWS_AS(snapshot_to_pauli_mps(inf[0]), std::invalid_argument);
  CHECK_THROWS_AS(snapshot_circuit(inf[0]), std::invalid_argument);
}

TEST_CASE("built-in observables have the advertised structure") {
  const int n = 4;
  const SparseObservable terms = ghz_projector_terms(n);
  CHECK(terms.size() == 16);
  const PeriodicMPS mps = ghz_projector_mps(n);
  CHECK(mps.max_bond() == 4);
  const PeriodicMPS diag = sparse_to_mps(terms);
  double worst = 0.0;
  for (int key = 0; key < 256; ++key) {
    const PauliString p = PauliString::from_label_key(key, n);
    double want = 0.0;
    for (int k = 0; k < terms.size(); ++k)
      if (terms.paulis[k].label_key() == static_cast<uint64_t>(key)) want += terms.coeffs[k];
    std::vector<int> idx(n);
    for (int q = 0; q < n; ++q) idx[q] = p.label(q);
    worst = std::max(worst, std::abs(mps.evaluate(idx) - want));
    worst = std::max(worst, std::abs(diag.evaluate(idx) - want));
  }
  CHECK(worst < 1e-14);

  const SparseObservable ham = cluster_hamiltonian(n);
  CHECK(ham.size() == 2 * n);
  CHECK(ham.infinity_norm_bound() == doctest::Approx(2.0 * n));
}

TEST_CASE("median of means reduces to the mean and resists one outlier") {
  const std::vector<double> v = {1, 2, 3, 4, 100, 6};
  CHECK(median_of_means(v, 1) == doctest::Approx(116.0 / 6));
  CHECK(median_of_means(v, 3) == doctest::Approx(3.5));
  CHECK(median_of_means(v, 6) == doctest::Approx(3.5));
  CHECK_THROWS_AS(median_of_means({}, 1), std::invalid_argument);
}

TEST_CASE("estimates are unbiased on a known state") {
  const int n = 4;
  const StabilizerState ghz = StabilizerState::ghz(n);
  const int shots = 3000;
  const auto snaps = acquire(ghz, 1, 2026, shots);
  const EigenvalueMPS t = build_t_mps(n, 1);

  const SparseObservable proj = ghz_projector_terms(n);
  const EstimationResult fid = estimate_sparse(proj, snaps, &t);
  const double se_fid = std::sqrt(fid.empirical_variance / shots);
  CHECK(std::abs(fid.estimate - 1.0) < 4 * se_fid + 1e-9);
  CHECK(fid.herald_epsilon == 0.0);
  CHECK(static_cast<int>(fid.block_means.size()) == 1);

  Rng rng(11, 3);
  SparseObservable obs(n);
  for (int k = 0; k < 5; ++k) {
    PauliString p(n);
    for (int q = 0; q < n; ++q) p.set_label(q, static_cast<int>(rng.next_below(4)));
    obs.add(std::move(p), rng.next_symmetric(1.0));
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
  psi(0) = psi(15) = 1.0 / std::sqrt(2.0);
  const Mat rho = psi * psi.adjoint();
  double truth = 0.0;
  for (int k = 0; k < obs.size(); ++k)
    truth += obs.coeffs[k] * (rho * dense_ref::pauli_string_mat(obs.paulis[k])).trace().real();
  const EstimationResult est = estimate_sparse(obs, snaps, &t);
  const double se = std::sqrt(est.empirical_variance / shots);
  CHECK(std::abs(est.estimate - truth) < 4 * se + 1e-9);

  // median of means on the same records stays consistent with the plain mean
  const EstimationResult mom = estimate_sparse(obs, snaps, &t, 10);
  CHECK(static_cast<int>(mom.block_means.size()) == 10);
  CHECK(std::abs(mom.estimate - truth) < 6 * se + 1e-9);
}

TEST_CASE("sparse and contraction routes agree record by record") {
  const int n = 4;
  const StabilizerState ghz = StabilizerState::ghz(n);
  const SparseObservable proj = ghz_projector_terms(n);
  const PeriodicMPS proj_mps = ghz_projector_mps(n);

  SUBCASE("exact inverse at depth zero") {
    const auto snaps = acquire(ghz, 0, 7, 50);
    const EstimationResult sp = estimate_sparse(proj, snaps);
    const PeriodicMPS inv = lift_depth0(n, true);
    const EstimationResult sh = estimate_shallow(proj_mps, snaps, inv, 0.0);
    const EstimationResult sh2 = estimate_shallow(proj_mps, snaps, inv, 0.0, 1, InverseSide::kSnapshot);
    CHECK(sp.estimate == doctest::Approx(sh.estimate).epsilon(1e-10));
    CHECK(sh.estimate == doctest::Approx(sh2.estimate).epsilon(1e-10));
  }

  SUBCASE("heralded inverse at depth one") {
    const auto snaps = acquire(ghz, 1, 8, 50);
    const EigenvalueMPS t = build_t_mps(n, 1);
    const EstimationResult sp = estimate_sparse(proj, snaps, &t);
    InversionConfig cfg;
    const InversionResult ir = invert(t, cfg);
    REQUIRE(ir.converged);
    const PeriodicMPS inv = lift_to_pauli_mps(ir.inverse, n);
    const EstimationResult sh = estimate_shallow(proj_mps, snaps, inv, ir.herald_epsilon);
    CHECK(std::abs(sp.estimate - sh.estimate) < 1e-5);
    CHECK(sh.herald_epsilon == ir.herald_epsilon);
  }
}

TEST_CASE("result json carries the published fields") {
  const StabilizerState ghz = StabilizerState::ghz(4);
  const auto snaps = acquire(ghz, 0, 3, 20);
  EstimationResult r = estimate_sparse(ghz_projector_terms(4), snaps, nullptr, 4);
  r.variance_bound = 2.5;
  const std::string text = r.to_json();
  CHECK(text.find("\"estimate\"") != std::string::npos);
  CHECK(text.find("\"block_means\"") != std::string::npos);
  CHECK(text.find("\"herald_epsilon\"") != std::string::npos);
  CHECK(text.find("\"variance_bound\"") != std::string::npos);
  CHECK(text.find("\"config_hash\"") != std::string::npos);
  CHECK(text.find("0x") != std::string::npos);
  CHECK(config_hash_of("abc") != config_hash_of("abd"));
  CHECK(config_hash_of("abc") == config_hash_of("abc"));
}
