#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <map>
#include <optional>

#include "uos/instance.hpp"

using uos::OrderedSelection;
using uos::UosInstance;

TEST_CASE("gaussian_matrix is deterministic per seed") {
  Eigen::MatrixXd a = uos::gaussian_matrix(2, 2, 1234u);
  Eigen::MatrixXd b = uos::gaussian_matrix(2, 2, 1234u);
  REQUIRE(a == b);
  Eigen::MatrixXd c = uos::gaussian_matrix(2, 2, 1235u);
  REQUIRE(a != c);
  CHECK_THROWS_AS(uos::gaussian_matrix(0, 2, 1u), std::invalid_argument);
  CHECK_THROWS_AS(uos::gaussian_matrix(2, 0, 1u), std::invalid_argument);
}

TEST_CASE("gaussian_matrix moments match the standard normal") {
  // Monte-Carlo oracle: for 10^6 draws the sample mean is within 0.01 of 0
  // and the sample variance within 0.01 of 1.
  Eigen::MatrixXd g = uos::gaussian_matrix(1000, 1000, 42u);
  const double mean = g.mean();
  const double var = (g.array() - mean).square().sum() / (g.size() - 1.0);
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("make_instance honors the requested noise level") {
  SECTION("noiseless") {
    UosInstance inst = uos::make_instance(12, 8, 3, std::nullopt, 7u);
    CHECK(inst.noiseless());
    CHECK(inst.w.norm() == 0.0);
    Eigen::VectorXd clean = uos::apply_selection(inst.s_true, inst.B * inst.y_true);
    REQUIRE((inst.x - clean).norm() <= 1e-12 * inst.x.norm());
  }
  SECTION("20 dB is realized exactly") {
    UosInstance inst = uos::make_instance(50, 40, 5, 20.0, 7u);
    const double clean_sq =
        uos::apply_selection(inst.s_true, inst.B * inst.y_true).squaredNorm();
    const double realized = clean_sq / inst.w.squaredNorm();
    CHECK(std::abs(realized - 100.0) / 100.0 < 1e-9);
    CHECK(inst.snr == Catch::Approx(100.0));
    // x decomposes into the recomputed clean part plus noise
    Eigen::VectorXd clean = uos::apply_selection(inst.s_true, inst.B * inst.y_true);
    REQUIRE((inst.x - clean - inst.w).norm() <= 1e-12 * inst.x.norm());
  }
  SECTION("invalid geometry") {
    CHECK_THROWS_AS(uos::make_instance(10, 4, 6, std::nullopt, 1u),
                    std::invalid_argument);
    CHECK_THROWS_AS(uos::make_instance(4, 6, 2, std::nullopt, 1u),
                    std::invalid_argument);
  }
}

TEST_CASE("true selections are uniform over subsets") {
  // Chi-square style Monte-Carlo oracle: n = 4, m = 2 has 6 subsets, each
  // should appear with frequency 1/6 +- 0.01 over 10^5 instances.
  std::map<std::vector<int>, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    UosInstance inst =
        uos::make_instance(4, 2, 1, std::nullopt, 1000000u + i);
    ++counts[inst.s_true.indices()];
  }
  REQUIRE(counts.size() == 6);
  for (const auto& [subset, count] : counts)
    CHECK(std::abs(count / static_cast<double>(draws) - 1.0 / 6.0) < 0.01);
}

TEST_CASE("cost is the squared residual") {
  UosInstance inst = uos::make_instance(10, 6, 2, std::nullopt, 3u);

  SECTION("ground truth zeroes a noiseless residual") {
    CHECK(uos::cost(inst.s_true, inst.y_true, inst) == 0.0);
  }
  SECTION("zero signal leaves the observation") {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    CHECK(uos::cost(inst.s_true, zero, inst) ==
          Catch::Approx(inst.x.squaredNorm()).epsilon(1e-14));
  }
  SECTION("matches an independent residual computation") {
    auto rng = uos::make_engine(77);
    for (int rep = 0; rep < 20; ++rep) {
      OrderedSelection s = OrderedSelection::random(6, 10, rng);
      Eigen::VectorXd y = Eigen::VectorXd::Random(2);
      // element-wise oracle, no shared matrix code
      double oracle = 0.0;
      for (int l = 0; l < 6; ++l) {
        double row = 0.0;
        for (int j = 0; j < 2; ++j)
          row += inst.B(s.indices()[static_cast<std::size_t>(l)], j) * y[j];
        const double diff = inst.x[l] - row;
        oracle += diff * diff;
      }
      const double got = uos::cost(s, y, inst);
      REQUIRE(std::abs(got - oracle) <= 1e-12 * std::max(1.0, oracle));
    }
  }
  SECTION("dimension mismatch") {
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(uos::cost(inst.s_true, bad, inst), std::invalid_argument);
  }
}

TEST_CASE("noiseless cost at the true selection reduces to the signal gap") {
  // f(S_true, y) = ||S_true B (y_true - y)||^2 for a noiseless instance.
  UosInstance inst = uos::make_instance(14, 9, 3, std::nullopt, 5u);
  auto rng = uos::make_engine(6);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd y = Eigen::VectorXd::Random(3);
    const double lhs = uos::cost(inst.s_true, y, inst);
    const double rhs =
        uos::apply_selection(inst.s_true, inst.B * (inst.y_true - y))
            .squaredNorm();
    REQUIRE(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, rhs));
  }
}

namespace {

// Explicit Kronecker lift H = y^T (x) S as a dense m x (k n) matrix; test
// oracle for the pair distance.
Eigen::MatrixXd lifted_signal(const Eigen::VectorXd& y,
                              const OrderedSelection& s) {
  const int m = s.m();
  const int n = s.n();
  const int k = static_cast<int>(y.size());
  Eigen::MatrixXd smat = Eigen::MatrixXd::Zero(m, n);
  for (int l = 0; l < m; ++l)
    smat(l, s.indices()[static_cast<std::size_t>(l)]) = 1.0;
  Eigen::MatrixXd h(m, k * n);
  for (int j = 0; j < k; ++j) h.middleCols(j * n, n) = y[j] * smat;
  return h;
}

}  // namespace

TEST_CASE("signal_distance matches the explicit Frobenius computation") {
  SECTION("coincident signals") {
    Eigen::VectorXd y(2);
    y << 1.0, -2.0;
    OrderedSelection s({0, 2}, 3);
    CHECK(uos::signal_distance({y, s, y, s}) == 0.0);
  }
  SECTION("orthogonal signals kill the cross term") {
    Eigen::VectorXd y(2), yp(2);
    y << 3.0, 0.0;
    yp << 0.0, 2.0;
    OrderedSelection s({0, 1}, 3);
    OrderedSelection sp({0, 2}, 3);
    const double expected = std::sqrt(2.0 * (9.0 + 4.0));
    CHECK(uos::signal_distance({y, s, yp, sp}) == Catch::Approx(expected));
  }
  SECTION("half-similar selections, equal signals") {
    Eigen::VectorXd y(2);
    y << 1.0, 0.0;
    OrderedSelection s({0, 1}, 3);
    OrderedSelection sp({0, 2}, 3);  // nu = 1/2
    const double got = uos::signal_distance({y, s, y, sp});
    CHECK(got == Catch::Approx(std::sqrt(2.0)));
    // explicit H oracle
    Eigen::MatrixXd h = lifted_signal(y, s);
    Eigen::MatrixXd hp = lifted_signal(y, sp);
    CHECK(got == Catch::Approx((h - hp).norm()));
  }
  SECTION("random pairs against the oracle") {
    auto rng = uos::make_engine(21);
    for (int rep = 0; rep < 30; ++rep) {
      const int n = 7, m = 4, k = 3;
      OrderedSelection s = OrderedSelection::random(m, n, rng);
      OrderedSelection sp = OrderedSelection::random(m, n, rng);
      Eigen::VectorXd y = Eigen::VectorXd::Random(k);
      Eigen::VectorXd yp = Eigen::VectorXd::Random(k);
      const double got = uos::signal_distance({y, s, yp, sp});
      const double expected =
          (lifted_signal(y, s) - lifted_signal(yp, sp)).norm();
      REQUIRE(got == Catch::Approx(expected).margin(1e-12));
    }
  }
  SECTION("full similarity reduces to the plain distance") {
    Eigen::VectorXd y(2), yp(2);
    y << 1.0, 2.0;
    yp << -1.0, 0.5;
    OrderedSelection s({1, 3, 4}, 6);
    CHECK(uos::signal_distance({y, s, yp, s}) ==
          Catch::Approx(std::sqrt(3.0) * (y - yp).norm()));
  }
}
