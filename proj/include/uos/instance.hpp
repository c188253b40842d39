#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>

#include "uos/rng.hpp"
#include "uos/selection.hpp"

namespace uos {

inline Eigen::MatrixXd gaussian_matrix(int n, int k, std::mt19937_64& rng) {
  if (n < 1 || k < 1)
    throw std::invalid_argument("gaussian_matrix: dimensions must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd b(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) b(i, j) = gauss(rng);
  return b;
}

inline Eigen::MatrixXd gaussian_matrix(int n, int k, std::uint64_t seed) {
  auto rng = make_engine(seed);
  return gaussian_matrix(n, k, rng);
}

inline Eigen::VectorXd gaussian_vector(int n, std::mt19937_64& rng) {
  return gaussian_matrix(n, 1, rng).col(0);
}

/// One sampling instance: observed samples x = S B y + w together with the
/// ground truth that generated them. Immutable after construction.
struct UosInstance {
  Eigen::MatrixXd B;        // n x k measurement matrix
  Eigen::VectorXd y_true;   // target signal
  OrderedSelection s_true;  // true selection
  Eigen::VectorXd w;        // noise (zero vector when noiseless)
  Eigen::VectorXd x;        // observed samples
  double snr;               // realized ||SBy||^2/||w||^2, +inf when noiseless

  int n() const { return static_cast<int>(B.rows()); }
  int k() const { return static_cast<int>(B.cols()); }
  int m() const { return s_true.m(); }
  bool noiseless() const { return !std::isfinite(snr); }
};

/// Residual cost f(S, y) = ||x - S B y||^2.
inline double cost(const OrderedSelection& s, const Eigen::VectorXd& y,
                   const UosInstance& inst) {
  if (s.n() != inst.n() || s.m() != inst.m() || y.size() != inst.k())
    throw std::invalid_argument("cost: dimension mismatch with instance");
  return (inst.x - apply_selection(s, inst.B * y)).squaredNorm();
}

/// Builds an instance with Gaussian B and y, a uniformly random selection,
/// and noise rescaled so the realized SNR hits the target exactly.
/// snr_db = nullopt means noiseless.
inline UosInstance make_instance(int n, int m, int k,
                                 std::optional<double> snr_db,
                                 std::uint64_t seed) {
  if (k < 1 || m < k || n < m)
    throw std::invalid_argument("make_instance: need 1 <= k <= m <= n");
  auto rng = make_engine(seed);
  Eigen::MatrixXd b = gaussian_matrix(n, k, rng);
  Eigen::VectorXd y = gaussian_vector(k, rng);
  OrderedSelection s = OrderedSelection::random(m, n, rng);
  Eigen::VectorXd clean = apply_selection(s, b * y);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  double snr = std::numeric_limits<double>::infinity();
  if (snr_db) {
    snr = std::pow(10.0, *snr_db / 10.0);
    // Exact rescaling instead of scaling in expectation keeps the realized
    // SNR free of trial-to-trial jitter.
    Eigen::VectorXd raw = gaussian_vector(m, rng);
    double raw_norm = raw.norm();
    while (raw_norm == 0.0) {  // probability-zero guard
      raw = gaussian_vector(m, rng);
      raw_norm = raw.norm();
    }
    w = raw * (clean.norm() / (raw_norm * std::sqrt(snr)));
  }
  return UosInstance{std::move(b), std::move(y), std::move(s), w, clean + w,
                     snr};
}

/// Same construction with a caller-supplied B (e.g. a convolution matrix).
inline UosInstance make_instance_with_matrix(Eigen::MatrixXd b, int m,
                                             std::optional<double> snr_db,
                                             std::uint64_t seed) {
  const int n = static_cast<int>(b.rows());
  const int k = static_cast<int>(b.cols());
  if (k < 1 || m < k || n < m)
    throw std::invalid_argument(
        "make_instance_with_matrix: need 1 <= k <= m <= n");
  auto rng = make_engine(seed);
  Eigen::VectorXd y = gaussian_vector(k, rng);
  OrderedSelection s = OrderedSelection::random(m, n, rng);
  Eigen::VectorXd clean = apply_selection(s, b * y);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  double snr = std::numeric_limits<double>::infinity();
  if (snr_db) {
    snr = std::pow(10.0, *snr_db / 10.0);
    Eigen::VectorXd raw = gaussian_vector(m, rng);
    double raw_norm = raw.norm();
    while (raw_norm == 0.0) {
      raw = gaussian_vector(m, rng);
      raw_norm = raw.norm();
    }
    w = raw * (clean.norm() / (raw_norm * std::sqrt(snr)));
  }
  return UosInstance{std::move(b), std::move(y), std::move(s), w, clean + w,
                     snr};
}

/// Two signals (y, S), (y', S') over a shared geometry.
struct SignalPair {
  Eigen::VectorXd y;
  OrderedSelection s;
  Eigen::VectorXd y_prime;
  OrderedSelection s_prime;

  SignalPair(Eigen::VectorXd y_, OrderedSelection s_, Eigen::VectorXd yp,
             OrderedSelection sp)
      : y(std::move(y_)),
        s(std::move(s_)),
        y_prime(std::move(yp)),
        s_prime(std::move(sp)) {
    if (s.m() != s_prime.m() || s.n() != s_prime.n())
      throw std::invalid_argument("SignalPair: selections must share (m, n)");
    if (y.size() != y_prime.size())
      throw std::invalid_argument("SignalPair: signals must share k");
  }

  int m() const { return s.m(); }
};

/// Frobenius distance between the two lifted signals:
/// d = sqrt(m||y||^2 + m||y'||^2 - 2 m nu <y, y'>).
inline double signal_distance(const SignalPair& p) {
  const double mm = static_cast<double>(p.m());
  const double nu = similarity(p.s, p.s_prime);
  const double d2 = mm * p.y.squaredNorm() + mm * p.y_prime.squaredNorm() -
                    2.0 * mm * nu * p.y.dot(p.y_prime);
  return std::sqrt(std::max(d2, 0.0));
}

}  // namespace uos
