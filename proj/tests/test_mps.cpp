#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "brickshadows/mps.hpp"
#include "brickshadows/rng.hpp"

using namespace brickshadows;

namespace {

PeriodicMPS random_mps(int sites, int phys, int bond, uint64_t seed) {
  Rng rng(seed, 0);
  std::vector<SiteTensor> ts(sites);
  for (int j = 0; j < sites; ++j) {
    ts[j].resize(phys);
    for (int v = 0; v < phys; ++v)
      ts[j][v] = Eigen::MatrixXd::NullaryExpr(bond, bond, [&] { return rng.next_symmetric(1.0); });
  }
  return PeriodicMPS(std::move(ts));
}

// every index string of a uniform-phys MPS, by counting in base `phys`
std::vector<std::vector<uint8_t>> all_strings(int sites, int phys) {
  std::vector<std::vector<uint8_t>> out;
  long total = 1;
  for (int j = 0; j < sites; ++j) total *= phys;
  for (long x = 0; x < total; ++x) {
    std::vector<uint8_t> idx(sites);
    long rem = x;
    for (int j = 0; j < sites; ++j) {
      idx[j] = static_cast<uint8_t>(rem % phys);
      rem /= phys;
    }
    out.push_back(std::move(idx));
  }
  return out;
}

}  // namespace

TEST_CASE("product form evaluates to the product of chosen scalars") {
  const PeriodicMPS m = PeriodicMPS::product({{2.0, 3.0}, {5.0, 7.0}});
  CHECK(m.evaluate(std::vector<uint8_t>{0, 0}) == doctest::Approx(10.0));
  CHECK(m.evaluate(std::vector<uint8_t>{1, 1}) == doctest::Approx(21.0));
  CHECK(m.evaluate(std::vector<uint8_t>{1, 0}) == doctest::Approx(15.0));
}

TEST_CASE("one-site ring takes a trace") {
  std::vector<SiteTensor> ts(1);
  ts[0] = {Eigen::MatrixXd::Identity(2, 2), 2.0 * Eigen::MatrixXd::Identity(2, 2)};
  const PeriodicMPS m(std::move(ts));
  CHECK(m.evaluate(std::vector<uint8_t>{1}) == doctest::Approx(4.0));
  CHECK(m.evaluate(std::vector<uint8_t>{0}) == doctest::Approx(2.0));

  const PeriodicMPS scalar = PeriodicMPS::product({{3.5}});
  CHECK(scalar.sum_all() == doctest::Approx(3.5));
}

TEST_CASE("evaluate agrees with the dense expansion on random instances") {
  for (const auto& [sites, phys, bond] : {std::tuple{6, 2, 3}, {4, 4, 2}, {3, 3, 4}}) {
    const PeriodicMPS m = random_mps(sites, phys, bond, 17 + sites);
    double sum = 0.0, frob = 0.0;
    for (const auto& idx : all_strings(sites, phys)) {
      const double v = m.evaluate(idx);
      CHECK(std::isfinite(v));
      sum += v;
      frob += v * v;
    }
    CHECK(m.sum_all() == doctest::Approx(sum).epsilon(1e-10));
    CHECK(m.frobenius_sq() == doctest::Approx(frob).epsilon(1e-10));
  }
}

TEST_CASE("all-ones vector sums to the string count") {
  const PeriodicMPS ones = PeriodicMPS::ones({2, 2, 2, 2, 2});
  CHECK(ones.sum_all() == doctest::Approx(32.0));
  CHECK(ones.frobenius_sq() == doctest::Approx(32.0));
}

TEST_CASE("pointwise product multiplies values and bond dimensions") {
  const PeriodicMPS a = random_mps(5, 2, 2, 3);
  const PeriodicMPS b = random_mps(5, 2, 3, 4);
  const PeriodicMPS ab = PeriodicMPS::hadamard(a, b);
  CHECK(ab.bond_dim(0) == 6);
  for (const auto& idx : all_strings(5, 2)) {
    const double want = a.evaluate(idx) * b.evaluate(idx);
    CHECK(ab.evaluate(idx) == doctest::Approx(want).epsilon(1e-10));
    CHECK(PeriodicMPS::hadamard(b, a).evaluate(idx) == doctest::Approx(want).epsilon(1e-10));
  }

  const PeriodicMPS ones = PeriodicMPS::ones({2, 2, 2, 2, 2});
  const PeriodicMPS same = PeriodicMPS::hadamard(a, ones);
  const PeriodicMPS sq = PeriodicMPS::hadamard(a, a);
  for (const auto& idx : all_strings(5, 2)) {
    CHECK(same.evaluate(idx) == doctest::Approx(a.evaluate(idx)).epsilon(1e-12));
    const double v = a.evaluate(idx);
    CHECK(sq.evaluate(idx) == doctest::Approx(v * v).epsilon(1e-10));
  }
}

TEST_CASE("sum_product contracts several factors at once") {
  const PeriodicMPS a = random_mps(4, 3, 2, 5);
  const PeriodicMPS b = random_mps(4, 3, 2, 6);
  const PeriodicMPS c = random_mps(4, 3, 2, 7);
  double want = 0.0;
  for (const auto& idx : all_strings(4, 3)) want += a.evaluate(idx) * b.evaluate(idx) * c.evaluate(idx);
  const PeriodicMPS* fs[] = {&a, &b, &c};
  CHECK(PeriodicMPS::sum_product(fs) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("scaling one site scales values linearly and the square quadratically") {
  PeriodicMPS m = random_mps(4, 2, 2, 9);
  const double f0 = m.frobenius_sq();
  const double v0 = m.evaluate(std::vector<uint8_t>{1, 0, 1, 1});
  m.scale(2.5);
  CHECK(m.evaluate(std::vector<uint8_t>{1, 0, 1, 1}) == doctest::Approx(2.5 * v0).epsilon(1e-12));
  CHECK(m.frobenius_sq() == doctest::Approx(2.5 * 2.5 * f0).epsilon(1e-12));
}

TEST_CASE("shape violations are rejected") {
  std::vector<SiteTensor> bad(2);
  bad[0] = {Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 3)};
  bad[1] = {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)};
  CHECK_THROWS_AS(PeriodicMPS(std::move(bad)), std::invalid_argument);

  const PeriodicMPS a = random_mps(3, 2, 2, 11);
  CHECK_THROWS_AS(a.evaluate(std::vector<uint8_t>{0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(a.evaluate(std::vector<uint8_t>{0, 1, 2}), std::out_of_range);
  const PeriodicMPS b = random_mps(4, 2, 2, 12);
  CHECK_THROWS_AS(PeriodicMPS::hadamard(a, b), std::invalid_argument);
}

TEST_CASE("json serialization round trips exactly") {
  const PeriodicMPS a = random_mps(4, 4, 3, 13);
  const PeriodicMPS back = PeriodicMPS::from_json(a.to_json());
  REQUIRE(back.num_sites() == 4);
  for (const auto& idx : all_strings(4, 4))
    CHECK(back.evaluate(idx) == doctest::Approx(a.evaluate(idx)).epsilon(1e-15));
  CHECK_THROWS(PeriodicMPS::from_json("{\"sites\": 3}"));
}
