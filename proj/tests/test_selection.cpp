#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "uos/rng.hpp"
#include "uos/selection.hpp"

using uos::OrderedSelection;

TEST_CASE("construction validates the index pattern") {
  REQUIRE_NOTHROW(OrderedSelection({0, 2, 3}, 4));
  REQUIRE_THROWS_AS(OrderedSelection({0, 2, 2}, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(OrderedSelection({2, 0}, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(OrderedSelection({0, 4}, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(OrderedSelection({-1, 2}, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(OrderedSelection({}, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(OrderedSelection({0, 1}, 1), std::invalid_argument);
}

TEST_CASE("apply_selection keeps the selected entries in order") {
  Eigen::VectorXd v(4);
  v << 10.0, 20.0, 30.0, 40.0;

  OrderedSelection s({0, 2, 3}, 4);
  Eigen::VectorXd out = uos::apply_selection(s, v);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == 10.0);
  CHECK(out[1] == 30.0);
  CHECK(out[2] == 40.0);

  CHECK(uos::apply_selection(OrderedSelection::full(4), v) == v);

  Eigen::VectorXd two(2);
  two << 5.0, 7.0;
  Eigen::VectorXd single =
      uos::apply_selection(OrderedSelection({1}, 2), two);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == 7.0);

  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(uos::apply_selection(s, wrong), std::invalid_argument);
}

TEST_CASE("selecting a lifted vector is the identity") {
  auto rng = uos::make_engine(11);
  for (int rep = 0; rep < 50; ++rep) {
    std::uniform_int_distribution<int> n_pick(1, 20);
    const int n = n_pick(rng);
    std::uniform_int_distribution<int> m_pick(1, n);
    const int m = m_pick(rng);
    OrderedSelection s = OrderedSelection::random(m, n, rng);
    Eigen::VectorXd x = Eigen::VectorXd::Random(m);
    Eigen::VectorXd roundtrip = uos::apply_selection(s, uos::lift(s, x));
    REQUIRE(roundtrip == x);
  }
}

TEST_CASE("select_rows commutes with matrix application") {
  auto rng = uos::make_engine(12);
  Eigen::MatrixXd b = Eigen::MatrixXd::Random(8, 3);
  Eigen::VectorXd y = Eigen::VectorXd::Random(3);
  OrderedSelection s = OrderedSelection::random(5, 8, rng);
  Eigen::VectorXd lhs = uos::select_rows(s, b) * y;
  Eigen::VectorXd rhs = uos::apply_selection(s, b * y);
  REQUIRE((lhs - rhs).norm() < 1e-14);
}

TEST_CASE("similarity counts positionwise agreement") {
  OrderedSelection a({0, 2, 3}, 5);
  CHECK(uos::similarity(a, a) == 1.0);

  OrderedSelection b({0, 1}, 4);
  OrderedSelection c({2, 3}, 4);
  CHECK(uos::similarity(b, c) == 0.0);

  OrderedSelection d({0, 1, 3}, 5);
  CHECK(uos::similarity(a, d) == Catch::Approx(2.0 / 3.0));
  CHECK(uos::similarity(d, a) == uos::similarity(a, d));

  // Same index at a different position does not count as a match.
  OrderedSelection e({1, 2}, 4);
  OrderedSelection f({2, 3}, 4);
  CHECK(uos::similarity(e, f) == 0.0);

  CHECK_THROWS_AS(uos::similarity(a, b), std::invalid_argument);
}

TEST_CASE("random selections cover all subsets roughly uniformly") {
  auto rng = uos::make_engine(99);
  std::map<std::vector<int>, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i)
    ++counts[OrderedSelection::random(2, 5, rng).indices()];
  REQUIRE(counts.size() == 10);
  for (const auto& [subset, count] : counts)
    CHECK(std::abs(count / static_cast<double>(draws) - 0.1) < 0.01);
}
