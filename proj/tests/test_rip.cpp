#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "uos/instance.hpp"
#include "uos/rip.hpp"

using uos::OrderedSelection;
using uos::PairRegion;
using uos::RipReport;

TEST_CASE("isometry ratio is exactly one for an adapted matrix") {
  // Column 0 all ones and y = e1: ||B y||^2 = n = n ||y||^2.
  Eigen::MatrixXd b(6, 2);
  b.col(0).setOnes();
  b.col(1) = Eigen::VectorXd::LinSpaced(6, -1.0, 4.0);
  Eigen::VectorXd y(2);
  y << 1.0, 0.0;
  CHECK(uos::isometry_ratio(b, OrderedSelection::full(6), y) == 1.0);
}

TEST_CASE("sampled ratios concentrate for large m") {
  Eigen::MatrixXd b = uos::gaussian_matrix(10000, 5, 77u);
  RipReport report = uos::check_rip_H(b, 10000, 1000, 78u);
  CHECK(std::abs(report.mean_ratio - 1.0) < 0.05);
  // constant_hat is tight over the sample
  for (const auto& row : report.trials)
    REQUIRE(std::abs(row.ratio - 1.0) <= report.constant_hat + 1e-15);
}

TEST_CASE("mean isometry over fresh matrices matches the chi-square rate") {
  // Each ratio with its own Gaussian B is chi^2_m / m; the mean over N
  // draws stays within 5 / sqrt(N m) of one.
  const int N = 1000, m = 100, n = 200, k = 5;
  double sum = 0.0;
  for (int t = 0; t < N; ++t) {
    auto rng = uos::make_engine(uos::derive_seed(910, 1, t));
    Eigen::MatrixXd b = uos::gaussian_matrix(n, k, rng);
    Eigen::VectorXd y = uos::gaussian_vector(k, rng);
    OrderedSelection s = OrderedSelection::random(m, n, rng);
    sum += uos::isometry_ratio(b, s, y);
  }
  const double mean = sum / N;
  INFO("mean ratio " << mean);
  CHECK(std::abs(mean - 1.0) <=
        5.0 / std::sqrt(static_cast<double>(N) * m));
}

TEST_CASE("the isometry constant tightens as m grows") {
  int wins = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::MatrixXd b =
        uos::gaussian_matrix(10000, 5, uos::derive_seed(900, 1, rep));
    RipReport small = uos::check_rip_H(b, 100, 50, uos::derive_seed(900, 2, rep));
    RipReport large =
        uos::check_rip_H(b, 10000, 50, uos::derive_seed(900, 3, rep));
    if (large.constant_hat < small.constant_hat) ++wins;
  }
  INFO("tightened in " << wins << "/100 repetitions");
  CHECK(wins >= 95);
}

TEST_CASE("check_rip_H argument validation") {
  Eigen::MatrixXd b = uos::gaussian_matrix(10, 2, 1u);
  CHECK_THROWS_AS(uos::check_rip_H(b, 5, 0, 1u), std::invalid_argument);
  CHECK_THROWS_AS(uos::check_rip_H(b, 11, 10, 1u), std::invalid_argument);
}

TEST_CASE("a negated pair reduces to the single-signal statistic") {
  auto rng = uos::make_engine(5u);
  Eigen::MatrixXd b = uos::gaussian_matrix(40, 3, rng);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd y = uos::gaussian_vector(3, rng);
    OrderedSelection s = OrderedSelection::random(25, 40, rng);
    const double pair = uos::pair_statistic(b, s, y, s, -y).ratio;
    const double single = uos::isometry_ratio(b, s, y);
    REQUIRE(std::abs(pair - single) <= 1e-12 * std::max(1.0, single));
  }
}

TEST_CASE("adversarial pairs differing in one row do not concentrate") {
  // Same signal, selections equal except the last row: the difference
  // statistic is a single Gaussian contrast, so its ratio has the spread of
  // a chi^2_1 variable no matter how large m is.
  const int n = 120, m = 100, k = 3;
  auto rng = uos::make_engine(84u);
  Eigen::VectorXd y = uos::gaussian_vector(k, rng);
  OrderedSelection s = OrderedSelection::first_m(m, n);
  std::vector<int> moved = s.indices();
  moved[static_cast<std::size_t>(m - 1)] = m;  // one past the original block
  OrderedSelection s_prime(moved, n);

  double sum = 0.0, sum_sq = 0.0;
  const int draws = 1000;
  for (int t = 0; t < draws; ++t) {
    Eigen::MatrixXd b =
        uos::gaussian_matrix(n, k, uos::derive_seed(902, 1, t));
    const auto stat = uos::pair_statistic(b, s, y, s_prime, y);
    // d^2 = 2 ||y||^2 exactly for this family
    REQUIRE(stat.d * stat.d ==
            Catch::Approx(2.0 * y.squaredNorm()).epsilon(1e-12));
    sum += stat.ratio;
    sum_sq += stat.ratio * stat.ratio;
  }
  const double mean = sum / draws;
  const double stddev = std::sqrt(sum_sq / draws - mean * mean);
  INFO("ratio mean " << mean << " std " << stddev);
  CHECK(stddev > 0.5);
}

TEST_CASE("relaxed-isometry sampling") {
  SECTION("the relaxed constant tightens as m grows") {
    int wins = 0;
    for (int rep = 0; rep < 100; ++rep) {
      Eigen::MatrixXd b =
          uos::gaussian_matrix(10000, 5, uos::derive_seed(901, 1, rep));
      RipReport small =
          uos::check_rrip(b, 100, 0.5, 30, uos::derive_seed(901, 2, rep));
      RipReport large =
          uos::check_rrip(b, 10000, 0.5, 30, uos::derive_seed(901, 3, rep));
      if (large.constant_hat < small.constant_hat) ++wins;
    }
    INFO("tightened in " << wins << "/100 repetitions");
    CHECK(wins >= 95);
  }
  SECTION("the excluded set shows an unbounded empirical constant") {
    Eigen::MatrixXd b = uos::gaussian_matrix(500, 3, 81u);
    RipReport excluded =
        uos::check_rrip(b, 400, 0.3, 5000, 82u, PairRegion::excluded);
    RipReport qualifying =
        uos::check_rrip(b, 400, 0.3, 5000, 83u, PairRegion::qualifying);
    INFO("excluded " << excluded.constant_hat << " qualifying "
                     << qualifying.constant_hat);
    CHECK(excluded.constant_hat > 3.0);
    CHECK(excluded.constant_hat > 5.0 * qualifying.constant_hat);
    CHECK(qualifying.constant_hat < 1.0);
  }
  SECTION("starved rejection raises a sampling failure") {
    Eigen::MatrixXd b = uos::gaussian_matrix(30, 2, 85u);
    // excluded pairs need d < mu * max norm, i.e. m > 2 / mu^2; m = 16 with
    // mu = 0.001 leaves nothing to sample
    CHECK_THROWS_AS(
        uos::check_rrip(b, 16, 0.001, 10, 86u, PairRegion::excluded),
        uos::SamplingFailureError);
    // qualifying pairs at mu close to 2 are just as rare
    CHECK_THROWS_AS(uos::check_rrip(b, 16, 1.95, 10, 87u),
                    uos::SamplingFailureError);
  }
  SECTION("mu validation") {
    Eigen::MatrixXd b = uos::gaussian_matrix(30, 2, 88u);
    CHECK_THROWS_AS(uos::check_rrip(b, 16, 0.0, 10, 89u),
                    std::invalid_argument);
    CHECK_THROWS_AS(uos::check_rrip(b, 16, 2.0, 10, 89u),
                    std::invalid_argument);
  }
}

TEST_CASE("entropy function") {
  CHECK(uos::entropy(0.0) == 0.0);
  CHECK(uos::entropy(1.0) == 0.0);
  CHECK(uos::entropy(0.5) == Catch::Approx(std::log(2.0)).epsilon(1e-15));
  // high-precision reference
  CHECK(uos::entropy(0.1) ==
        Catch::Approx(0.32508297339144824).epsilon(1e-14));
  // symmetry
  for (double t : {0.05, 0.2, 0.37, 0.44})
    CHECK(uos::entropy(t) == Catch::Approx(uos::entropy(1.0 - t)).epsilon(1e-14));
  CHECK_THROWS_AS(uos::entropy(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(uos::entropy(1.1), std::invalid_argument);
}

TEST_CASE("feasibility calculator") {
  SECTION("small kappa and theta approach the negative noise term") {
    const double lhs =
        uos::feasibility_lhs({1e-9, 1e-9, 0.3, 0.5, 1.0});
    CHECK(lhs == Catch::Approx(-0.5 * 0.3 * 0.3 * 0.5 * 0.5).margin(1e-6));
    CHECK(lhs < 0.0);
  }
  SECTION("high-precision reference point") {
    CHECK(uos::feasibility_lhs({0.01, 0.01, 0.3, 0.5, 1.0}) ==
          Catch::Approx(0.06523285362745774).epsilon(1e-13));
  }
  SECTION("monotone in kappa, antitone in c") {
    const uos::FeasibilityInputs base{0.1, 0.2, 0.3, 0.5, 1.0};
    auto bumped = base;
    bumped.kappa += 1e-6;
    CHECK(uos::feasibility_lhs(bumped) > uos::feasibility_lhs(base));
    bumped = base;
    bumped.c += 1e-6;
    CHECK(uos::feasibility_lhs(bumped) < uos::feasibility_lhs(base));
  }
  SECTION("range validation") {
    CHECK_THROWS_AS(uos::feasibility_lhs({0.0, 0.2, 0.3, 0.5, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(uos::feasibility_lhs({0.1, 1.0, 0.3, 0.5, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(uos::feasibility_lhs({0.1, 0.2, 0.3, 0.5, 0.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("oversampling scale") {
  CHECK(uos::oversampling_scale(0.3, 0.5, 1.0) ==
        Catch::Approx(181.05617131209244).epsilon(1e-13));
  // explicit 1/c factor
  CHECK(uos::oversampling_scale(0.3, 0.5, 2.0) ==
        Catch::Approx(0.5 * 181.05617131209244).epsilon(1e-13));
  // delta -> 0 asymptote
  const double d = 1e-6;
  const double exact = uos::oversampling_scale(d, 0.5, 1.0);
  const double asymptote = 2.0 * std::log(2.0 / d) / (d * d * 0.25);
  CHECK(exact / asymptote == Catch::Approx(1.0).margin(1e-4));
  CHECK_THROWS_AS(uos::oversampling_scale(0.0, 0.5, 1.0),
                  std::invalid_argument);
}

TEST_CASE("initialization probability and exponent") {
  SECTION("degenerate gammas") {
    CHECK(uos::init_probability(20, 10, 0.0) == 1.0);
    CHECK(uos::init_exponent(0.5, 0.0) == Catch::Approx(0.0).margin(1e-15));
    CHECK(uos::init_exponent(0.5, 1.0) ==
          Catch::Approx(uos::entropy(0.5)).epsilon(1e-14));
  }
  SECTION("exact binomial reference at n = 20") {
    // C(18, 8) / C(20, 10)
    CHECK(uos::init_probability(20, 10, 0.2) ==
          Catch::Approx(0.23684210526315789).epsilon(1e-12));
  }
  SECTION("Monte-Carlo frequency against the first-m reference") {
    const int n = 20, m = 10;
    const OrderedSelection reference = OrderedSelection::first_m(m, n);
    auto rng = uos::make_engine(400u);
    int hits = 0;
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) {
      OrderedSelection s = OrderedSelection::random(m, n, rng);
      if (uos::similarity(s, reference) >= 0.2 - 1e-12) ++hits;
    }
    const double freq = hits / static_cast<double>(draws);
    CHECK(std::abs(freq - uos::init_probability(n, m, 0.2)) < 0.01);
  }
  SECTION("exponent matches the finite-n rate") {
    for (double gamma : {0.2, 0.5}) {
      const double p = uos::init_probability(400, 200, gamma);
      const double rate = -std::log(p) / 400.0;
      const double exponent = uos::init_exponent(0.5, gamma);
      CHECK(std::abs(rate - exponent) / exponent < 0.1);
    }
  }
  SECTION("positive exponent across gamma") {
    for (double gamma : {0.1, 0.3, 0.5, 0.7, 0.9})
      CHECK(uos::init_exponent(0.5, gamma) > 0.0);
  }
  SECTION("validation") {
    CHECK_THROWS_AS(uos::init_probability(10, 11, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(uos::init_exponent(0.0, 0.5), std::invalid_argument);
  }
}
