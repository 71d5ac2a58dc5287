#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "brickshadows/channel.hpp"
#include "brickshadows/inverse.hpp"
#include "brickshadows/rng.hpp"

using namespace brickshadows;

namespace {

PeriodicMPS random_two_slice(int sites, int bond, Rng& rng) {
  std::vector<SiteTensor> ts(sites);
  for (int j = 0; j < sites; ++j) {
    ts[j].resize(2);
    for (int k = 0; k < 2; ++k)
      ts[j][k] = Eigen::MatrixXd::NullaryExpr(bond, bond, [&] { return rng.next_symmetric(1.0); });
  }
  return PeriodicMPS(std::move(ts));
}

}  // namespace

TEST_CASE("local quadratic expansion reproduces the enumerated cost") {
  Rng rng(3, 1);
  PeriodicMPS m = random_two_slice(3, 2, rng);
  PeriodicMPS v = random_two_slice(3, 2, rng);
  for (int site = 0; site < 3; ++site) {
    for (int k = 0; k < 2; ++k) {
      Eigen::MatrixXd a;
      Eigen::VectorXd b;
      local_quadratic(m, v, site, k, &a, &b);
      PeriodicMPS probe = v;
      probe.site(site)[k].setZero();
      const double g0 = inversion_cost_exhaustive(m, probe);
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXd x =
            Eigen::MatrixXd::NullaryExpr(2, 2, [&] { return rng.next_symmetric(2.0); });
        probe.site(site)[k] = x;
        const double direct = inversion_cost_exhaustive(m, probe);
        Eigen::VectorXd xv(4);
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) xv(r * 2 + c) = x(r, c);
        const double model = xv.dot(a * xv) + b.dot(xv) + g0;
        CHECK(direct == doctest::Approx(model).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("contracted and enumerated residuals agree") {
  Rng rng(5, 2);
  PeriodicMPS m = random_two_slice(4, 2, rng);
  PeriodicMPS v = random_two_slice(4, 3, rng);
  CHECK(inversion_cost(m, v) == doctest::Approx(inversion_cost_exhaustive(m, v)).epsilon(1e-8));

  // spread vanishes exactly on a translation-invariant candidate
  std::vector<SiteTensor> same(4, v.site(0));
  CHECK(translation_spread(PeriodicMPS(std::move(same))) == doctest::Approx(0.0));
  CHECK(translation_spread(v) > 0.0);
}

TEST_CASE("one entangling layer inverts to machine precision at bond one") {
  const EigenvalueMPS t = build_t_mps(6, 1);
  InversionConfig cfg;
  cfg.stages = {{1, 50}};
  cfg.seed = 17;
  const InversionResult res = invert(t, cfg);
  CHECK(res.final_cost < 1e-12);
  CHECK(res.converged);
  CHECK(res.n == 6);
  CHECK(res.d == 1);
  CHECK(res.herald_epsilon == doctest::Approx(std::sqrt(res.final_cost)));

  const std::vector<int> sig{1, 0, 1};
  CHECK(t.inner().evaluate(sig) * res.inverse.evaluate(sig) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bond growth reaches the heralded regime on ten qubits at depth three") {
  const EigenvalueMPS t = build_t_mps(10, 3);
  InversionConfig cfg;
  cfg.stages = {{2, 100}, {3, 400}};
  cfg.seed = 7;
  const InversionResult res = invert(t, cfg);
  CHECK(res.final_cost < 1e-6);
  CHECK(res.chi == 3);
  CHECK(res.n == 10);
  CHECK(res.d == 3);
  REQUIRE(!res.cost_history.empty());
  for (double h : res.cost_history) CHECK(res.final_cost <= h * (1.0 + 1e-12));

  // the herald is a certified bound on the worst pointwise relative error
  const double eps = res.herald_epsilon;
  double worst = 0.0;
  for (int bits = 0; bits < 32; ++bits) {
    std::vector<int> sig(5);
    for (int j = 0; j < 5; ++j) sig[j] = (bits >> j) & 1;
    worst = std::max(worst, std::abs(t.inner().evaluate(sig) * res.inverse.evaluate(sig) - 1.0));
  }
  CHECK(worst <= eps + 1e-12);

  const InversionResult round = InversionResult::from_json(res.to_json());
  CHECK(round.n == res.n);
  CHECK(round.d == res.d);
  CHECK(round.chi == res.chi);
  CHECK(round.final_cost == doctest::Approx(res.final_cost).epsilon(1e-15));
  CHECK(round.converged == res.converged);
  const std::vector<int> sig{1, 1, 0, 1, 0};
  CHECK(round.inverse.evaluate(sig) == doctest::Approx(res.inverse.evaluate(sig)).epsilon(1e-14));
}

TEST_CASE("an underpowered run reports failure instead of a false herald") {
  const EigenvalueMPS t = build_t_mps(10, 3);
  InversionConfig cfg;
  cfg.stages = {{1, 30}};
  cfg.seed = 7;
  const InversionResult res = invert(t, cfg);
  CHECK(!res.converged);
  CHECK(res.final_cost > cfg.stop_cost);
  CHECK(res.herald_epsilon == doctest::Approx(std::sqrt(res.final_cost)));
}
