#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "brickshadows/brickwork.hpp"
#include "brickshadows/channel.hpp"
#include "brickshadows/markov.hpp"
#include "brickshadows/pauli.hpp"
#include "brickshadows/rng.hpp"

using namespace brickshadows;

namespace {

PauliString from_labels(std::initializer_list<int> ls) {
  PauliString p(static_cast<int>(ls.size()));
  int q = 0;
  for (int l : ls) p.set_label(q++, l);
  return p;
}

PauliString random_string(int n, Rng& rng) {
  PauliString p(n);
  for (int q = 0; q < n; ++q) p.set_label(q, static_cast<int>(rng.next_below(4)));
  return p;
}

long oracle_index(const PauliString& p) {
  long idx = 0, place = 1;
  for (int q = 0; q < p.num_qubits(); ++q) {
    idx += p.label(q) * place;
    place *= 4;
  }
  return idx;
}

long pair_oracle_index(const PauliString& a, const PauliString& b) {
  long idx = 0, place = 1;
  for (int q = 0; q < a.num_qubits(); ++q) {
    idx += (4 * a.label(q) + b.label(q)) * place;
    place *= 16;
  }
  return idx;
}

}  // namespace

TEST_CASE("signature kernel anchors and terminal weights") {
  const Eigen::MatrixXd bk = signature_gate_kernel();
  CHECK(bk(0, 0) == doctest::Approx(1.0));
  CHECK(bk(1, 3) == doctest::Approx(0.2));
  CHECK(bk(2, 3) == doctest::Approx(0.2));
  CHECK(bk(3, 3) == doctest::Approx(0.6));
  CHECK(std::abs(bk(0, 3)) < 1e-14);
  CHECK((bk.col(1) - bk.col(3)).cwiseAbs().maxCoeff() < 1e-15);
  for (int c = 0; c < 4; ++c) CHECK(bk.col(c).sum() == doctest::Approx(1.0));

  const Eigen::Vector2d w = signature_terminal();
  CHECK(w(0) == doctest::Approx(1.0));
  CHECK(w(1) == doctest::Approx(1.0 / 3.0));

  const Eigen::MatrixXd& pk = pair_gate_kernel();
  REQUIRE(pk.rows() == 256);
  for (int c = 0; c < 256; ++c) {
    CHECK(pk.col(c).minCoeff() >= 0.0);
    CHECK(pk.col(c).sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("single entangling layer reproduces the two-qubit gate average") {
  const EigenvalueMPS mps = build_t_mps(2, 1);
  CHECK(mps.value(from_labels({1, 0})) == doctest::Approx(0.2));
  CHECK(mps.value(from_labels({0, 0})) == doctest::Approx(1.0));
}

TEST_CASE("depth-0 closed form matches the dense walk") {
  const auto t0 = DenseMarkovOracle::all_eigenvalues(4, 0);
  const PauliString p = from_labels({1, 0, 3, 2});
  CHECK(t_value(p, 0) == doctest::Approx(t0[oracle_index(p)]).epsilon(1e-14));
  // single-qubit factors: identity passes, anything else lands on Z a third of the time
  CHECK(t_value(from_labels({0, 0, 0, 0}), 0) == doctest::Approx(1.0));
  CHECK(t_value(from_labels({2, 0, 0, 0}), 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("eigenvalue MPS matches the dense walk on every string") {
  for (int n : {2, 4}) {
    for (int d = 1; d <= 4; ++d) {
      const EigenvalueMPS mps = build_t_mps(n, d);
      const Eigen::VectorXd oracle = DenseMarkovOracle::all_eigenvalues(n, d);
      long total = 1;
      for (int i = 0; i < n; ++i) total *= 4;
      double worst = 0;
      for (long idx = 0; idx < total; ++idx) {
        PauliString p(n);
        long rem = idx;
        for (int q = 0; q < n; ++q) {
          p.set_label(q, static_cast<int>(rem % 4));
          rem /= 4;
        }
        worst = std::max(worst, std::abs(oracle[idx] - mps.value(p)));
        if (idx % 37 == 0) CHECK(t_value(p, d, &mps) == doctest::Approx(mps.value(p)).epsilon(1e-14));
      }
      CAPTURE(n);
      CAPTURE(d);
      CHECK(worst < 1e-12);
    }
  }
  CHECK_THROWS_AS(t_value(from_labels({1, 0}), 2), std::invalid_argument);
}

TEST_CASE("pair MPS matches the dense pair walk") {
  for (int d = 1; d <= kMaxTauDepth; ++d) {
    const PairEigenvalueMPS tau = build_tau_mps(4, d);
    const Eigen::VectorXd oracle = DenseMarkovOracle::all_pair_values(4, d);
    const EigenvalueMPS tmps = build_t_mps(4, d);
    Rng rng(7, static_cast<uint64_t>(d));
    double worst = 0, worst_diag = 0;
    for (int trial = 0; trial < 2000; ++trial) {
      const PauliString a = random_string(4, rng);
      const PauliString b = random_string(4, rng);
      worst = std::max(worst, std::abs(oracle[pair_oracle_index(a, b)] - tau.value(a, b)));
      worst_diag = std::max(worst_diag, std::abs(tau.value(a, a) - tmps.value(a)));
    }
    CAPTURE(d);
    CHECK(worst < 1e-12);
    CHECK(worst_diag < 1e-12);
  }
}

TEST_CASE("depth-0 pair probability closed form matches the dense walk") {
  const Eigen::VectorXd oracle = DenseMarkovOracle::all_pair_values(2, 0);
  Rng rng(9, 0);
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const PauliString a = random_string(2, rng);
    const PauliString b = random_string(2, rng);
    worst = std::max(worst, std::abs(oracle[pair_oracle_index(a, b)] - tau_value(a, b, 0)));
  }
  CHECK(worst < 1e-14);
  CHECK_THROWS_AS(tau_value(from_labels({1, 0}), from_labels({1, 0}), kDepthInfinite),
                  std::invalid_argument);
}

TEST_CASE("pair probabilities obey the joint-distribution constraints") {
  const int n = 4;
  for (int d : {1, 2}) {
    const PairEigenvalueMPS tau = build_tau_mps(n, d);
    const EigenvalueMPS tmps = build_t_mps(n, d);
    Rng rng(21, static_cast<uint64_t>(d));
    for (int trial = 0; trial < 400; ++trial) {
      const PauliString a = random_string(n, rng);
      const PauliString b = random_string(n, rng);
      const PauliString ab = PauliString::from_label_key(a.label_key() ^ b.label_key(), n);
      const double v = tau.value(a, b);
      // tau is a probability of a joint event, so each marginal bounds it;
      // the product of two Z-type strings is Z-type, which bounds it by t of the product too
      CHECK(v >= -1e-14);
      CHECK(v <= std::min({tmps.value(a), tmps.value(b), tmps.value(ab)}) + 1e-12);
      CHECK(tau.value(b, a) == doctest::Approx(v).epsilon(1e-12));
      CHECK(tau.value(a, ab) == doctest::Approx(v).epsilon(1e-12));
      if (!a.commutes_with(b)) CHECK(std::abs(v) < 1e-13);
    }
  }

  // one brick layer: gates act on disjoint pairs, so supports confined to
  // different bricks scramble independently
  const PairEigenvalueMPS tau1 = build_tau_mps(6, 1);
  const EigenvalueMPS t1 = build_t_mps(6, 1);
  const PauliString a = from_labels({3, 1, 0, 0, 0, 0});
  const PauliString b = from_labels({0, 0, 0, 0, 2, 2});
  CHECK(tau1.value(a, b) == doctest::Approx(t1.value(a) * t1.value(b)).epsilon(1e-12));
}

TEST_CASE("eigenvalues stay in the unit interval and respect the cell symmetry") {
  const int n = 6;
  std::vector<EigenvalueMPS> by_depth;
  for (int d = 1; d <= 4; ++d) by_depth.push_back(build_t_mps(n, d));

  Rng rng(33, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const PauliString p = random_string(n, rng);
    PauliString shifted(n);
    for (int q = 0; q < n; ++q) shifted.set_label((q + 2) % n, p.label(q));
    for (const auto& mps : by_depth) {
      const double v = mps.value(p);
      CHECK(v > 0.0);
      CHECK(v <= 1.0 + 1e-12);
      // the brickwork pattern repeats every two qubits on a ring
      CHECK(mps.value(shifted) == doctest::Approx(v).epsilon(1e-12));
    }
  }
  for (const auto& mps : by_depth) {
    PauliString id(n);
    CHECK(mps.value(id) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(mps.value_on_signature(std::vector<uint8_t>(n / 2, 0)) == doctest::Approx(1.0));
  }

  // depth drives every non-identity eigenvalue toward the uniform-Clifford
  // value 1/(2^n+1): fully supported strings climb to it from below, single
  // sites descend to it from 1/3
  const double deep = 1.0 / ((1 << n) + 1);
  for (int g : {1, 2, 3}) {
    PauliString full(n), single(n);
    for (int q = 0; q < n; ++q) full.set_label(q, g);
    single.set_label(0, g);

    double prev = t_value(full, 0);
    CHECK(prev == doctest::Approx(std::pow(1.0 / 3.0, n)));
    for (const auto& mps : by_depth) {
      const double cur = mps.value(full);
      CHECK(cur >= prev - 1e-12);
      CHECK(cur <= deep + 1e-12);
      prev = cur;
    }

    prev = t_value(single, 0);
    CHECK(prev == doctest::Approx(1.0 / 3.0));
    for (const auto& mps : by_depth) {
      const double cur = mps.value(single);
      CHECK(cur <= prev + 1e-12);
      CHECK(cur >= deep - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("lifting a signature MPS to qubit labels preserves values") {
  const EigenvalueMPS mps = build_t_mps(4, 2);
  const PeriodicMPS lifted = lift_to_pauli_mps(mps.inner(), 4);
  Rng rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    PauliString p(4);
    std::vector<int> labels(4);
    for (int q = 0; q < 4; ++q) {
      labels[q] = static_cast<int>(rng.next_below(4));
      p.set_label(q, labels[q]);
    }
    CHECK(lifted.evaluate(std::span<const int>(labels)) == doctest::Approx(mps.value(p)).epsilon(1e-12));
  }
}

TEST_CASE("closed-form lifts for the unscrambled and fully scrambled limits") {
  const PeriodicMPS inf = lift_depth_infinite(4, false);
  const PeriodicMPS infi = lift_depth_infinite(4, true);
  const std::vector<int> id{0, 0, 0, 0}, zx{1, 2, 0, 0};
  CHECK(inf.evaluate(std::span<const int>(id)) == doctest::Approx(1.0));
  CHECK(inf.evaluate(std::span<const int>(zx)) == doctest::Approx(1.0 / 17.0));
  CHECK(infi.evaluate(std::span<const int>(zx)) == doctest::Approx(17.0));
  CHECK(infi.evaluate(std::span<const int>(id)) == doctest::Approx(1.0));

  const PeriodicMPS d0 = lift_depth0(4, false);
  const PeriodicMPS d0i = lift_depth0(4, true);
  CHECK(d0.evaluate(std::span<const int>(zx)) == doctest::Approx(1.0 / 9.0));
  CHECK(d0i.evaluate(std::span<const int>(zx)) == doctest::Approx(9.0));
}

TEST_CASE("per-qubit pair form agrees with the shared-cell evaluation") {
  const PairEigenvalueMPS tau = build_tau_mps(4, 2);
  const PeriodicMPS q16 = tau.to_qubit_mps();
  Rng rng(13, 0);
  for (int trial = 0; trial < 100; ++trial) {
    PauliString a(4), b(4);
    std::vector<int> m(4);
    for (int q = 0; q < 4; ++q) {
      a.set_label(q, static_cast<int>(rng.next_below(4)));
      b.set_label(q, static_cast<int>(rng.next_below(4)));
      m[q] = 4 * a.label(q) + b.label(q);
    }
    CHECK(q16.evaluate(std::span<const int>(m)) == doctest::Approx(tau.value(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("pointwise channel application multiplies coefficients by eigenvalues") {
  const int n = 4;
  const EigenvalueMPS t = build_t_mps(n, 2);
  Rng rng(41, 0);
  std::vector<std::vector<double>> vals(n);
  for (int q = 0; q < n; ++q)
    for (int g = 0; g < 4; ++g) vals[q].push_back(rng.next_symmetric(1.0));
  const PeriodicMPS alpha = PeriodicMPS::product(vals);
  const PeriodicMPS pushed = apply_channel(alpha, t);
  for (int trial = 0; trial < 60; ++trial) {
    PauliString p(n);
    std::vector<int> labels(n);
    for (int q = 0; q < n; ++q) {
      labels[q] = static_cast<int>(rng.next_below(4));
      p.set_label(q, labels[q]);
    }
    const double want = alpha.evaluate(std::span<const int>(labels)) * t.value(p);
    CHECK(pushed.evaluate(std::span<const int>(labels)) == doctest::Approx(want).epsilon(1e-12));
  }
}
