#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "uos/errors.hpp"
#include "uos/instance.hpp"
#include "uos/rng.hpp"
#include "uos/selection.hpp"

namespace uos {

/// One sampled isometry ratio. For single-signal checks d, nu and the second
/// norm are not applicable and stay NaN.
struct RipTrialRow {
  double ratio = 0.0;
  double d = std::numeric_limits<double>::quiet_NaN();
  double nu = std::numeric_limits<double>::quiet_NaN();
  double norm_h = std::numeric_limits<double>::quiet_NaN();
  double norm_h_prime = std::numeric_limits<double>::quiet_NaN();
};

struct RipReport {
  double constant_hat = 0.0;  // tight: max |ratio - 1| over the sample
  double mean_ratio = 0.0;
  int num_samples = 0;
  int n = 0, m = 0, k = 0;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double acceptance_rate = 1.0;
  std::vector<RipTrialRow> trials;
};

/// Isometry ratio ||S B y||^2 / (m ||y||^2) for a single signal; the
/// denominator is the squared Frobenius norm of the lifted signal.
inline double isometry_ratio(const Eigen::MatrixXd& b,
                             const OrderedSelection& s,
                             const Eigen::VectorXd& y) {
  const double denom = static_cast<double>(s.m()) * y.squaredNorm();
  if (denom <= 0.0)
    throw std::invalid_argument("isometry_ratio: zero signal");
  return apply_selection(s, b * y).squaredNorm() / denom;
}

/// Distance and difference ratio for a pair of signals:
/// ratio = ||S B y - S' B y'||^2 / d^2 with d the pair distance.
struct PairStatistic {
  double ratio;
  double d;
  double nu;
  double norm_h;
  double norm_h_prime;
};

inline PairStatistic pair_statistic(const Eigen::MatrixXd& b,
                                    const OrderedSelection& s,
                                    const Eigen::VectorXd& y,
                                    const OrderedSelection& s_prime,
                                    const Eigen::VectorXd& y_prime) {
  SignalPair pair{y, s, y_prime, s_prime};
  const double d = signal_distance(pair);
  const double mm = static_cast<double>(s.m());
  const double diff =
      (apply_selection(s, b * y) - apply_selection(s_prime, b * y_prime))
          .squaredNorm();
  return PairStatistic{d > 0 ? diff / (d * d)
                             : std::numeric_limits<double>::quiet_NaN(),
                       d, similarity(s, s_prime), std::sqrt(mm) * y.norm(),
                       std::sqrt(mm) * y_prime.norm()};
}

/// Samples random (y, S) pairs and records the tightest constant for which
/// every ratio lies in [1 - eps, 1 + eps].
inline RipReport check_rip_H(const Eigen::MatrixXd& b, int m, int num_trials,
                             std::uint64_t seed) {
  const int n = static_cast<int>(b.rows());
  const int k = static_cast<int>(b.cols());
  if (num_trials < 1)
    throw std::invalid_argument("check_rip_H: num_trials must be >= 1");
  if (m < 1 || m > n)
    throw std::invalid_argument("check_rip_H: need 1 <= m <= n");

  RipReport report;
  report.n = n;
  report.m = m;
  report.k = k;
  report.trials.reserve(static_cast<std::size_t>(num_trials));
  double sum = 0.0;
  for (int t = 0; t < num_trials; ++t) {
    auto rng = make_engine(derive_seed(seed, 0x726970u, t));
    Eigen::VectorXd y = gaussian_vector(k, rng);
    OrderedSelection s = OrderedSelection::random(m, n, rng);
    RipTrialRow row;
    row.ratio = isometry_ratio(b, s, y);
    row.norm_h = std::sqrt(static_cast<double>(m)) * y.norm();
    report.trials.push_back(row);
    report.constant_hat =
        std::max(report.constant_hat, std::abs(row.ratio - 1.0));
    sum += row.ratio;
  }
  report.num_samples = num_trials;
  report.mean_ratio = sum / num_trials;
  return report;
}

/// Which side of the distance threshold the pair sampler keeps.
/// `qualifying` draws independent pairs at distance >= mu * max norm (the
/// pairs the relaxed isometry covers). `excluded` draws single-position
/// perturbations below the threshold: the near-coincident family on which no
/// uniform concentration holds, kept for diagnostics.
enum class PairRegion { qualifying, excluded };

inline RipReport check_rrip(const Eigen::MatrixXd& b, int m, double mu,
                            int num_trials, std::uint64_t seed,
                            PairRegion region = PairRegion::qualifying) {
  const int n = static_cast<int>(b.rows());
  const int k = static_cast<int>(b.cols());
  if (num_trials < 1)
    throw std::invalid_argument("check_rrip: num_trials must be >= 1");
  if (m < 1 || m > n)
    throw std::invalid_argument("check_rrip: need 1 <= m <= n");
  // d never exceeds twice the larger norm, so mu >= 2 accepts nothing.
  if (!(mu > 0.0) || mu >= 2.0)
    throw std::invalid_argument("check_rrip: mu must lie in (0, 2)");

  constexpr double kMinAcceptance = 1e-3;
  constexpr std::int64_t kMinProposals = 10000;

  RipReport report;
  report.n = n;
  report.m = m;
  report.k = k;
  report.mu = mu;
  report.trials.reserve(static_cast<std::size_t>(num_trials));
  double sum = 0.0;
  std::int64_t proposals = 0;
  int accepted = 0;
  std::int64_t counter = 0;
  while (accepted < num_trials) {
    auto rng = make_engine(derive_seed(seed, 0x72726970u, counter++));
    ++proposals;
    if (proposals >= kMinProposals &&
        static_cast<double>(accepted) / static_cast<double>(proposals) <
            kMinAcceptance) {
      throw SamplingFailureError(
          "check_rrip: rejection acceptance below 0.1%; requested region is "
          "too small for (m, mu)");
    }

    Eigen::VectorXd y = gaussian_vector(k, rng);
    OrderedSelection s = OrderedSelection::random(m, n, rng);
    Eigen::VectorXd y_prime;
    OrderedSelection s_prime = s;
    if (region == PairRegion::qualifying) {
      y_prime = gaussian_vector(k, rng);
      s_prime = OrderedSelection::random(m, n, rng);
    } else {
      // Single-position perturbation: same signal, one selected index moved.
      y_prime = y;
      std::vector<int> idx = s.indices();
      std::uniform_int_distribution<int> pos_pick(0, m - 1);
      const int p = pos_pick(rng);
      const int lo = p > 0 ? idx[static_cast<std::size_t>(p - 1)] + 1 : 0;
      const int hi = p + 1 < m ? idx[static_cast<std::size_t>(p + 1)] - 1 : n - 1;
      std::vector<int> options;
      for (int v = lo; v <= hi; ++v)
        if (v != idx[static_cast<std::size_t>(p)]) options.push_back(v);
      if (options.empty()) continue;
      std::uniform_int_distribution<int> opt_pick(
          0, static_cast<int>(options.size()) - 1);
      idx[static_cast<std::size_t>(p)] =
          options[static_cast<std::size_t>(opt_pick(rng))];
      s_prime = OrderedSelection(std::move(idx), n);
    }

    PairStatistic stat = pair_statistic(b, s, y, s_prime, y_prime);
    const double threshold = mu * std::max(stat.norm_h, stat.norm_h_prime);
    const bool inside = region == PairRegion::qualifying
                            ? stat.d >= threshold
                            : (stat.d > 0.0 && stat.d < threshold);
    if (!inside) continue;

    RipTrialRow row;
    row.ratio = stat.ratio;
    row.d = stat.d;
    row.nu = stat.nu;
    row.norm_h = stat.norm_h;
    row.norm_h_prime = stat.norm_h_prime;
    report.trials.push_back(row);
    report.constant_hat =
        std::max(report.constant_hat, std::abs(row.ratio - 1.0));
    sum += row.ratio;
    ++accepted;
  }
  report.num_samples = accepted;
  report.mean_ratio = sum / accepted;
  report.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(proposals);
  return report;
}

/// Natural-log binary entropy, endpoints extended by continuity.
inline double entropy(double theta) {
  if (theta < 0.0 || theta > 1.0)
    throw std::invalid_argument("entropy: argument must lie in [0, 1]");
  if (theta == 0.0 || theta == 1.0) return 0.0;
  return -theta * std::log(theta) - (1.0 - theta) * std::log(1.0 - theta);
}

struct FeasibilityInputs {
  double kappa;     // k / n
  double theta;     // (n - m) / n
  double delta;     // relaxed isometry constant
  double mu;        // precision
  double c = 1.0;   // concentration constant; no numeric value is published,
                    // so absolute feasibility regions depend on calibration
};

/// Asymptotic feasibility left-hand side
/// kappa log(1 + 2/delta) + h(theta) - c delta^2 mu^2 (1 - theta) / 2;
/// negative means the failure exponent wins.
inline double feasibility_lhs(const FeasibilityInputs& in) {
  if (!(in.kappa > 0.0 && in.kappa < 1.0))
    throw std::invalid_argument("feasibility_lhs: kappa must lie in (0, 1)");
  if (!(in.theta > 0.0 && in.theta < 1.0))
    throw std::invalid_argument("feasibility_lhs: theta must lie in (0, 1)");
  if (!(in.delta > 0.0 && in.delta < 1.0))
    throw std::invalid_argument("feasibility_lhs: delta must lie in (0, 1)");
  if (!(in.mu > 0.0 && in.mu <= 1.0))
    throw std::invalid_argument("feasibility_lhs: mu must lie in (0, 1]");
  if (!(in.c > 0.0))
    throw std::invalid_argument("feasibility_lhs: c must be positive");
  return in.kappa * std::log(1.0 + 2.0 / in.delta) + entropy(in.theta) -
         0.5 * in.c * in.delta * in.delta * in.mu * in.mu * (1.0 - in.theta);
}

/// Oversampling factor n/k ~ 2 log(1 + 2/delta) / (c delta^2 mu^2) sufficient
/// when only o(n) samples are missing.
inline double oversampling_scale(double delta, double mu, double c) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("oversampling_scale: delta must lie in (0, 1)");
  if (!(mu > 0.0 && mu <= 1.0))
    throw std::invalid_argument("oversampling_scale: mu must lie in (0, 1]");
  if (!(c > 0.0))
    throw std::invalid_argument("oversampling_scale: c must be positive");
  return 2.0 * std::log(1.0 + 2.0 / delta) / (c * delta * delta * mu * mu);
}

// log C(n, k) via log-gamma; exact enough for n up to 10^3 and beyond.
inline double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// P[nu(S, S_check) >= gamma] for a uniform selection against the first-m
/// reference: C(n - q, m - q) / C(n, m) with q = ceil(gamma m).
inline double init_probability(int n, int m, double gamma) {
  if (m < 1 || m > n)
    throw std::invalid_argument("init_probability: need 1 <= m <= n");
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("init_probability: gamma must lie in [0, 1]");
  const int q = static_cast<int>(std::ceil(gamma * m - 1e-12));
  if (q <= 0) return 1.0;
  return std::exp(log_binomial(n - q, m - q) - log_binomial(n, m));
}

/// Large-n exponent of the same probability:
/// eps(rho, gamma) = h(rho) - (1 - rho gamma) h((rho - rho gamma)/(1 - rho gamma)).
inline double init_exponent(double rho, double gamma) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("init_exponent: rho must lie in (0, 1)");
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("init_exponent: gamma must lie in [0, 1]");
  const double scale = 1.0 - rho * gamma;
  return entropy(rho) - scale * entropy((rho - rho * gamma) / scale);
}

}  // namespace uos
