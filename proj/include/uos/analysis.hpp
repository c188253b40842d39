#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "uos/errors.hpp"

namespace uos {

/// Rescaled parameters of the fixed-point analysis:
///   varsigma = sqrt((1 + delta) / (1 - delta))   (isometry distortion)
///   varrho   = 2 zeta / sqrt(1 - delta)          (normalized noise level)
/// varsigma = 1, varrho = 0 is the ideal limit; finite-delta parameters have
/// varsigma > 1. The contraction regime additionally needs varrho < 1.
struct FixedPointParams {
  double varsigma = 1.0;
  double varrho = 0.0;
  std::optional<double> delta;  // set when built from isometry parameters
  std::optional<double> zeta;

  static FixedPointParams from_sigma_rho(double varsigma, double varrho) {
    if (!(varsigma >= 1.0))
      throw std::invalid_argument("FixedPointParams: varsigma must be >= 1");
    if (!(varrho >= 0.0))
      throw std::invalid_argument("FixedPointParams: varrho must be >= 0");
    return FixedPointParams{varsigma, varrho, std::nullopt, std::nullopt};
  }

  static FixedPointParams from_rip(double delta, double snr, double epsilon) {
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("FixedPointParams: delta must lie in (0, 1)");
    if (!(snr > 0.0))
      throw std::invalid_argument("FixedPointParams: snr must be positive");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
      throw std::invalid_argument(
          "FixedPointParams: epsilon must lie in [0, 1)");
    const double varsigma = std::sqrt((1.0 + delta) / (1.0 - delta));
    const double zeta = 1.0 / std::sqrt(snr * (1.0 - epsilon));
    const double varrho = 2.0 * zeta / std::sqrt(1.0 - delta);
    return FixedPointParams{varsigma, varrho, delta, zeta};
  }

  void require_contraction() const {
    if (!(varrho < 1.0))
      throw ConditionViolatedError(
          "contraction condition violated: varrho >= 1 (noise too large for "
          "the isometry constant)");
  }
};

/// varpi(nu) = varsigma sqrt(1 - nu^2) + varrho, the distance bound one
/// signal-block step can guarantee at similarity nu.
inline double varpi(double nu, const FixedPointParams& p) {
  if (nu < 0.0 || nu > 1.0)
    throw std::invalid_argument("varpi: nu must lie in [0, 1]");
  return p.varsigma * std::sqrt(std::max(0.0, 1.0 - nu * nu)) + p.varrho;
}

/// Threshold similarity nu0 = sqrt(1 - ((1 - varrho)/varsigma)^2):
/// varpi(nu) < 1 exactly on (nu0, 1].
inline double nu0(const FixedPointParams& p) {
  p.require_contraction();
  const double ratio = (1.0 - p.varrho) / p.varsigma;
  return std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
}

struct ThetaRoots {
  double theta_min;
  double theta_max;
};

/// Roots of Q(theta) = theta^2 - 2 theta nu + 1 - varpi(nu)^2, the corner
/// abscissas of the feasible region at similarity nu. The discriminant is
/// nonnegative for every nu in [0, 1] when varsigma >= 1.
inline ThetaRoots theta_roots(double nu, const FixedPointParams& p) {
  if (nu < 0.0 || nu > 1.0)
    throw std::invalid_argument("theta_roots: nu must lie in [0, 1]");
  const double w = varpi(nu, p);
  const double disc = std::max(0.0, nu * nu - 1.0 + w * w);
  const double root = std::sqrt(disc);
  return ThetaRoots{nu - root, nu + root};
}

namespace detail {
// F(nu) = M(theta_min(nu)) for nu in (nu0, 1]; may be negative.
inline double envelope_m(double theta_min, const FixedPointParams& p) {
  const double one_minus = 1.0 - theta_min;
  const double distorted = p.varsigma * one_minus + p.varrho;
  return 1.0 +
         (one_minus * one_minus - distorted * distorted) / (2.0 * theta_min);
}
// theta_min below this is treated as the nu -> nu0+ limit, where the
// envelope formula is a 0/0 form whose limit is -infinity for any
// varsigma + varrho > 1; the clipped envelope is 0 there.
constexpr double kThetaMinCutoff = 1e-9;
}  // namespace detail

/// Unclipped envelope F(nu); only meaningful for nu in (nu0, 1].
inline double envelope_raw(double nu, const FixedPointParams& p) {
  p.require_contraction();
  const double tmin = theta_roots(nu, p).theta_min;
  if (tmin <= detail::kThetaMinCutoff) {
    if (p.varsigma + p.varrho <= 1.0) return 1.0;  // ideal limit params
    return -std::numeric_limits<double>::infinity();
  }
  return detail::envelope_m(tmin, p);
}

/// Lower envelope F0 of the one-iteration similarity map:
/// 0 on [0, nu0], (F(nu))_+ on (nu0, 1].
inline double envelope(double nu, const FixedPointParams& p) {
  if (nu < 0.0 || nu > 1.0)
    throw std::invalid_argument("envelope: nu must lie in [0, 1]");
  p.require_contraction();
  if (nu <= nu0(p)) return 0.0;
  return std::max(0.0, envelope_raw(nu, p));
}

/// F_max = F(1) = 1 + (1 - (1 + varsigma)^2)/2 * varrho^2/(1 - varrho),
/// the upper end of the envelope range.
inline double f_max(const FixedPointParams& p) {
  if (!(p.varrho < 1.0))
    throw std::invalid_argument("f_max: varrho must lie in [0, 1)");
  const double s1 = 1.0 + p.varsigma;
  return 1.0 +
         0.5 * (1.0 - s1 * s1) * p.varrho * p.varrho / (1.0 - p.varrho);
}

/// Smallest nu with F(nu) > 0, located by bisection on the raw envelope.
/// Empty when the envelope never becomes positive (F_max <= 0).
inline std::optional<double> nu1(const FixedPointParams& p) {
  p.require_contraction();
  if (f_max(p) <= 0.0) return std::nullopt;
  double lo = nu0(p);
  double hi = 1.0;
  if (envelope_raw(std::nextafter(lo, 1.0), p) > 0.0) return lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (envelope_raw(mid, p) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

struct NoiselessFixedPoints {
  double nu_min;
  double nu_max;  // always 1 in the noiseless regime
};

/// Noiseless fixed points of the envelope. The nontrivial fixed point solves
///   sin(a) + (1 - sqrt(varsigma^2 - 1)) cos(a) = 1,  a in (0, pi/2),
/// found by bracketed bisection; the closed form a_min = pi/2 - 2 beta with
/// tan(beta) = 1 - sqrt(varsigma^2 - 1) serves as a cross-check. Only
/// varsigma in (1, sqrt(2)] admits the interior root.
inline NoiselessFixedPoints noiseless_fixed_points(double varsigma) {
  if (!(varsigma > 1.0 && varsigma <= std::numbers::sqrt2 + 1e-15))
    throw OutOfRegimeError(
        "noiseless_fixed_points: varsigma must lie in (1, sqrt(2)]");
  const double t = 1.0 - std::sqrt(varsigma * varsigma - 1.0);
  if (t <= 1e-12)  // varsigma == sqrt(2): both fixed points coincide at 1
    return NoiselessFixedPoints{1.0, 1.0};

  const auto g = [t](double a) { return std::sin(a) + t * std::cos(a) - 1.0; };
  // g < 0 near 0 (t < 1), g > 0 at its maximum, g = 0 again at pi/2.
  double lo = 1e-15;
  double hi = std::atan2(1.0, t);  // argmax of sin + t cos
  if (!(g(lo) < 0.0 && g(hi) > 0.0))
    throw OutOfRegimeError("noiseless_fixed_points: bracketing failed");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double alpha_min = 0.5 * (lo + hi);
  return NoiselessFixedPoints{std::sin(alpha_min), 1.0};
}

/// upsilon(alpha): the fixed-point function of the noisy envelope in the
/// angular variable nu = sin(alpha). Convex on (0, pi/2) with poles at both
/// endpoints; its roots (when they exist) are the two envelope fixed points.
inline double upsilon(double alpha, const FixedPointParams& p) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(alpha > 0.0 && alpha < half_pi))
    throw std::invalid_argument("upsilon: alpha must lie in (0, pi/2)");
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  const double edge = c + s - 1.0;
  return ((p.varsigma - 1.0) * c + p.varrho) / edge -
         edge / ((p.varsigma + 1.0) * c + p.varrho);
}

/// Closed-form sufficient condition for two roots:
/// varsigma + varrho sqrt(2) < sqrt(7 - 4 sqrt(2)) makes upsilon(pi/4) < 0.
inline bool in_domain_sufficient(const FixedPointParams& p) {
  return p.varsigma + p.varrho * std::numbers::sqrt2 <
         std::sqrt(7.0 - 4.0 * std::numbers::sqrt2);
}

struct NoisyFixedPoints {
  double alpha_min;
  double alpha_max;
  double nu_min;   // sin(alpha_min)
  double nu_max;   // sin(alpha_max)
};

/// Locates the fixed points of the noisy envelope by sign-change detection
/// on a dense alpha grid followed by bisection to 1e-10. Returns empty when
/// upsilon does not exhibit two sign changes (parameters outside the
/// two-fixed-point domain): absence of roots is a valid answer, not an
/// error. Grid-plus-bisection is used instead of Newton because of the
/// endpoint poles.
inline std::optional<NoisyFixedPoints> noisy_fixed_points(
    const FixedPointParams& p, int grid_points = 10000) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  const double lo = 1e-6;
  const double hi = half_pi - 1e-6;
  const double step = (hi - lo) / grid_points;

  std::vector<double> brackets;
  double prev_a = lo;
  double prev_v = upsilon(prev_a, p);
  for (int i = 1; i <= grid_points; ++i) {
    const double a = lo + i * step;
    const double v = upsilon(a, p);
    if ((prev_v < 0.0) != (v < 0.0)) {
      brackets.push_back(prev_a);
      brackets.push_back(a);
    }
    prev_a = a;
    prev_v = v;
  }
  if (brackets.size() != 4) return std::nullopt;

  const auto bisect = [&p](double a_lo, double a_hi) {
    double v_lo = upsilon(a_lo, p);
    while (a_hi - a_lo > 1e-10) {
      const double mid = 0.5 * (a_lo + a_hi);
      const double v_mid = upsilon(mid, p);
      if ((v_lo < 0.0) == (v_mid < 0.0)) {
        a_lo = mid;
        v_lo = v_mid;
      } else {
        a_hi = mid;
      }
    }
    return 0.5 * (a_lo + a_hi);
  };
  const double a_min = bisect(brackets[0], brackets[1]);
  const double a_max = bisect(brackets[2], brackets[3]);
  return NoisyFixedPoints{a_min, a_max, std::sin(a_min), std::sin(a_max)};
}

/// Similarity trace, either analytic (iterating the envelope) or empirical
/// (lifted from a solver run).
struct EvolutionTrace {
  bool analytic = true;
  std::vector<double> nu;
  std::vector<double> xi;     // empirical mode only
  std::vector<double> theta;  // empirical mode only
};

inline EvolutionTrace make_empirical_trace(std::vector<double> nu,
                                           std::vector<double> xi,
                                           std::vector<double> theta) {
  if (nu.size() != xi.size() || nu.size() != theta.size())
    throw std::invalid_argument(
        "make_empirical_trace: series must have equal length");
  EvolutionTrace trace;
  trace.analytic = false;
  trace.nu = std::move(nu);
  trace.xi = std::move(xi);
  trace.theta = std::move(theta);
  return trace;
}

/// Fraction of steps in an empirical trace with nu[t+1] >= F0(nu[t]) - tol.
/// The bound holds only with the probability the relaxed isometry grants, so
/// this is a diagnostic rate, never a hard invariant.
inline double envelope_agreement_rate(const EvolutionTrace& trace,
                                      const FixedPointParams& p,
                                      double tol = 1e-9) {
  if (trace.nu.size() < 2)
    throw std::invalid_argument("envelope_agreement_rate: need >= 2 steps");
  int hits = 0;
  const int steps = static_cast<int>(trace.nu.size()) - 1;
  for (int t = 0; t < steps; ++t)
    if (trace.nu[static_cast<std::size_t>(t) + 1] >=
        envelope(trace.nu[static_cast<std::size_t>(t)], p) - tol)
      ++hits;
  return static_cast<double>(hits) / steps;
}

/// Iterates nu <- F0(nu) for the requested number of steps (stops early once
/// the value is numerically stationary).
inline EvolutionTrace evolve(const FixedPointParams& p, double nu_init,
                             int steps) {
  if (nu_init < 0.0 || nu_init > 1.0)
    throw std::invalid_argument("evolve: nu_init must lie in [0, 1]");
  if (steps < 0) throw std::invalid_argument("evolve: steps must be >= 0");
  EvolutionTrace trace;
  trace.nu.reserve(static_cast<std::size_t>(steps) + 1);
  trace.nu.push_back(nu_init);
  double current = nu_init;
  for (int t = 0; t < steps; ++t) {
    const double next = std::clamp(envelope(current, p), 0.0, 1.0);
    trace.nu.push_back(next);
    if (next == current) break;
    current = next;
  }
  return trace;
}

/// Envelope curve with its landmarks, ready for serialization.
struct EnvelopeCurve {
  std::vector<double> nu_grid;
  std::vector<double> f0;
  double nu0_value = 0.0;
  double f_max_value = 0.0;
  std::optional<double> nu1_value;
  std::optional<double> nu_min;
  std::optional<double> nu_max;
};

inline EnvelopeCurve envelope_curve(const FixedPointParams& p,
                                    int grid_points = 1000) {
  if (grid_points < 2)
    throw std::invalid_argument("envelope_curve: need at least 2 grid points");
  EnvelopeCurve curve;
  curve.nu_grid.reserve(static_cast<std::size_t>(grid_points) + 1);
  curve.f0.reserve(static_cast<std::size_t>(grid_points) + 1);
  for (int i = 0; i <= grid_points; ++i) {
    const double nu = static_cast<double>(i) / grid_points;
    curve.nu_grid.push_back(nu);
    curve.f0.push_back(envelope(nu, p));
  }
  curve.nu0_value = nu0(p);
  curve.f_max_value = f_max(p);
  curve.nu1_value = nu1(p);
  if (p.varrho == 0.0) {
    if (p.varsigma > 1.0 && p.varsigma <= std::numbers::sqrt2) {
      const auto fp = noiseless_fixed_points(p.varsigma);
      curve.nu_min = fp.nu_min;
      curve.nu_max = fp.nu_max;
    }
  } else if (auto fp = noisy_fixed_points(p)) {
    curve.nu_min = fp->nu_min;
    curve.nu_max = fp->nu_max;
  }
  return curve;
}

struct DecodingRadius {
  double chi;            // relative radius of the recovery guarantee
  double radius_exact;   // neighborhood factor 2/sqrt(1-2 eps) (1+1/sqrt(snr)) mu
  double radius_approx;  // its large-snr, small-eps limit 2 mu
};

/// Recovery-radius calculator. With eta = 1 this is the baseline guarantee
///   chi = max{ mu sqrt((1+eps)/(1-eps)) (1 + 2/sqrt(snr)),
///              2 / sqrt(snr (1 - 2 delta)) };
/// general eta >= 1 replaces the 2's by eta + 1.
inline DecodingRadius decoding_radius(double epsilon, double delta, double mu,
                                      double snr, double eta = 1.0) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("decoding_radius: epsilon must lie in (0, 1/2)");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("decoding_radius: delta must lie in (0, 1/2)");
  if (!(mu > 0.0)) throw std::invalid_argument("decoding_radius: mu > 0");
  if (!(snr > 0.0)) throw std::invalid_argument("decoding_radius: snr > 0");
  if (!(eta >= 1.0)) throw std::invalid_argument("decoding_radius: eta >= 1");
  const double amplification = eta + 1.0;
  const double first = mu * std::sqrt((1.0 + epsilon) / (1.0 - epsilon)) *
                       (1.0 + amplification / std::sqrt(snr));
  const double second = amplification / std::sqrt(snr * (1.0 - 2.0 * delta));
  const double exact =
      2.0 / std::sqrt(1.0 - 2.0 * epsilon) * (1.0 + 1.0 / std::sqrt(snr)) * mu;
  return DecodingRadius{std::max(first, second), exact, 2.0 * mu};
}

}  // namespace uos
