#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uos/errors.hpp"
#include "uos/instance.hpp"
#include "uos/matching.hpp"
#include "uos/rng.hpp"
#include "uos/selection.hpp"

namespace uos {

struct AltMinConfig {
  int max_iter = 100;
  double cost_tol = 1e-10;  // stall when |dcost| < cost_tol * (1 + cost)
};

enum class Termination { selection_fixed_point, cost_stall, max_iter, failed };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::selection_fixed_point:
      return "selection-fixed-point";
    case Termination::cost_stall:
      return "cost-stall";
    case Termination::max_iter:
      return "max-iter";
    case Termination::failed:
      return "failed";
  }
  return "unknown";
}

/// One solver iteration as recorded in the trace. nu/xi/theta compare the
/// iterate against the instance ground truth.
struct IterationRecord {
  int iteration = 0;
  double cost_after_signal = 0.0;     // f(S^t, y^t)
  double cost_after_selection = 0.0;  // f(S^{t+1}, y^t)
  double nu = 0.0;                    // similarity(S^t, S_true)
  double xi = 0.0;                    // ||y^t||^2 / ||y_true||^2
  double theta = 0.0;                 // <y^t, y_true> / ||y_true||^2
};

struct SolveReport {
  SolveReport(OrderedSelection s_init, Eigen::VectorXd y_init)
      : s(std::move(s_init)), y(std::move(y_init)) {}

  OrderedSelection s;
  Eigen::VectorXd y;
  double cost = 0.0;
  double residual = 0.0;  // sqrt(cost)
  int iterations = 0;
  Termination reason = Termination::max_iter;
  bool certified = false;
  int restarts_used = 1;
  std::vector<IterationRecord> trace;

  double nu_final() const { return trace.empty() ? 0.0 : trace.back().nu; }
};

/// Least-squares projection y = (S B)^+ x via a rank-revealing QR.
/// Throws SingularSystemError when S B loses column rank.
inline Eigen::VectorXd project_signal(const OrderedSelection& s,
                                      const UosInstance& inst) {
  if (s.n() != inst.n() || s.m() != inst.m())
    throw std::invalid_argument("project_signal: selection does not match instance");
  Eigen::MatrixXd sb = select_rows(s, inst.B);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sb);
  const int rank = static_cast<int>(qr.rank());
  if (rank < inst.k())
    throw SingularSystemError(
        "project_signal: S*B is rank-deficient (rank " + std::to_string(rank) +
            " < k = " + std::to_string(inst.k()) + ")",
        rank);
  return qr.solve(inst.x);
}

/// Alternating minimization: least squares on the signal block, dynamic
/// programming on the selection block, until the selection repeats, the cost
/// stalls, or the iteration budget runs out.
inline SolveReport altmin_solve(const UosInstance& inst,
                                const OrderedSelection& s_init,
                                const AltMinConfig& cfg = {}) {
  if (s_init.n() != inst.n() || s_init.m() != inst.m())
    throw std::invalid_argument("altmin_solve: init does not match instance");
  if (cfg.max_iter < 1)
    throw std::invalid_argument("altmin_solve: max_iter must be >= 1");

  const double y_true_sq = inst.y_true.squaredNorm();
  OrderedSelection s = s_init;
  Eigen::VectorXd y;
  double prev_full_cost = std::numeric_limits<double>::infinity();
  SolveReport report(s, Eigen::VectorXd::Zero(inst.k()));

  for (int t = 1; t <= cfg.max_iter; ++t) {
    y = project_signal(s, inst);
    const double cost_y = cost(s, y, inst);
    SelectionProjection proj = project_selection(inst.x, inst.B * y);

    IterationRecord rec;
    rec.iteration = t;
    rec.cost_after_signal = cost_y;
    rec.cost_after_selection = proj.cost;
    rec.nu = similarity(s, inst.s_true);
    rec.xi = y_true_sq > 0 ? y.squaredNorm() / y_true_sq : 0.0;
    rec.theta = y_true_sq > 0 ? y.dot(inst.y_true) / y_true_sq : 0.0;
    report.trace.push_back(rec);
    report.iterations = t;

    if (proj.selection == s) {
      report.s = s;
      report.y = y;
      report.cost = cost_y;
      report.reason = Termination::selection_fixed_point;
      report.residual = std::sqrt(report.cost);
      return report;
    }
    report.s = proj.selection;
    report.y = y;
    report.cost = proj.cost;

    if (std::abs(prev_full_cost - proj.cost) <
        cfg.cost_tol * (1.0 + proj.cost)) {
      report.reason = Termination::cost_stall;
      report.residual = std::sqrt(report.cost);
      return report;
    }
    prev_full_cost = proj.cost;
    s = proj.selection;
  }
  report.reason = Termination::max_iter;
  report.residual = std::sqrt(report.cost);
  return report;
}

/// Feasibility certificate: residual within eta times the noise radius.
/// A small floating-point floor keeps the noiseless case (noise norm zero,
/// residual at machine-precision scale) certifiable.
inline bool certify(const SolveReport& report, double noise_norm, double eta,
                    double observation_norm = 1.0) {
  if (eta < 1.0) throw std::invalid_argument("certify: eta must be >= 1");
  const double fp_floor = 1e-10 * (1.0 + observation_norm);
  return report.residual <= eta * noise_norm + fp_floor;
}

inline bool certify(const SolveReport& report, const UosInstance& inst,
                    double eta) {
  return certify(report, inst.w.norm(), eta, inst.x.norm());
}

namespace detail {

// log(exp(a) + exp(b)) without overflow; -inf encodes an empty count.
inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace detail

/// Draws a selection that agrees with s_true in exactly ceil(nu * m)
/// positions (same index at the same position), uniformly over all such
/// selections. Sampling walks the index axis with a suffix-count table over
/// states (indices consumed, positions filled, matches used); log-space
/// counts keep C(n, m)-sized tallies representable. Throws
/// InfeasibleInitError when no selection with the requested overlap exists
/// (e.g. nu = 0 with m = n).
inline OrderedSelection genie_init(const OrderedSelection& s_true,
                                   double nu_target, std::uint64_t seed) {
  if (nu_target < 0.0 || nu_target > 1.0)
    throw std::invalid_argument("genie_init: nu must lie in [0, 1]");
  const int m = s_true.m();
  const int n = s_true.n();
  const int q = static_cast<int>(std::ceil(nu_target * m - 1e-12));
  if (q >= m) return s_true;

  const auto& truth = s_true.indices();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // Feasible band of "positions filled" after consuming v indices:
  // p <= v and m - p <= n - v.
  const auto p_lo = [&](int v) { return std::max(0, m - (n - v)); };
  const auto p_hi = [&](int v) { return std::min(m, v); };

  // Per-v contiguous blocks of (p - p_lo(v)) x (q + 1) log-counts.
  std::vector<std::size_t> offset(static_cast<std::size_t>(n) + 2, 0);
  for (int v = 0; v <= n; ++v)
    offset[static_cast<std::size_t>(v) + 1] =
        offset[static_cast<std::size_t>(v)] +
        static_cast<std::size_t>(p_hi(v) - p_lo(v) + 1) *
            static_cast<std::size_t>(q + 1);
  const std::size_t states = offset[static_cast<std::size_t>(n) + 1];
  if (states > std::size_t{250000000})
    throw std::invalid_argument(
        "genie_init: state table too large for this (n, m, nu)");
  std::vector<double> logc(states, kNegInf);
  const auto at = [&](int v, int p, int t) -> double& {
    return logc[offset[static_cast<std::size_t>(v)] +
                static_cast<std::size_t>(p - p_lo(v)) *
                    static_cast<std::size_t>(q + 1) +
                static_cast<std::size_t>(t)];
  };

  at(n, m, q) = 0.0;  // the single completed state
  for (int v = n - 1; v >= 0; --v) {
    for (int p = p_lo(v); p <= p_hi(v); ++p) {
      for (int t = 0; t <= q; ++t) {
        double total = kNegInf;
        // skip index v
        if (p >= p_lo(v + 1) && n - v - 1 >= m - p) total = at(v + 1, p, t);
        // assign index v to position p
        if (p < m && p + 1 >= p_lo(v + 1)) {
          const int match = truth[static_cast<std::size_t>(p)] == v ? 1 : 0;
          if (t + match <= q)
            total = detail::log_add(total, at(v + 1, p + 1, t + match));
        }
        at(v, p, t) = total;
      }
    }
  }
  if (at(0, 0, 0) == kNegInf)
    throw InfeasibleInitError(
        "genie_init: no selection with the requested exact overlap exists");

  auto rng = make_engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> result;
  result.reserve(static_cast<std::size_t>(m));
  int p = 0, t = 0;
  for (int v = 0; v < n && p < m; ++v) {
    const int match = truth[static_cast<std::size_t>(p)] == v ? 1 : 0;
    const double log_assign = (p + 1 >= p_lo(v + 1) && t + match <= q)
                                  ? at(v + 1, p + 1, t + match)
                                  : kNegInf;
    const double log_skip =
        (p >= p_lo(v + 1) && n - v - 1 >= m - p) ? at(v + 1, p, t) : kNegInf;
    const double log_total = detail::log_add(log_assign, log_skip);
    const bool take =
        log_assign != kNegInf &&
        (log_skip == kNegInf ||
         unit(rng) < std::exp(log_assign - log_total));
    if (take) {
      result.push_back(v);
      ++p;
      t += match;
    }
  }
  return OrderedSelection(std::move(result), n);
}

/// Copies ceil(nu * m) uniformly chosen rows of the truth and fills every
/// remaining stretch with a uniform increasing subset of the open index
/// range. Coincidental agreement in the filled rows is allowed, so the
/// realized similarity is at least nu (contrast with genie_init, which makes
/// it exact). Always feasible: the true indices themselves witness every
/// stretch.
inline OrderedSelection genie_init_copy_rows(const OrderedSelection& s_true,
                                             double nu_target,
                                             std::uint64_t seed) {
  if (nu_target < 0.0 || nu_target > 1.0)
    throw std::invalid_argument("genie_init_copy_rows: nu must lie in [0, 1]");
  const int m = s_true.m();
  const int n = s_true.n();
  const int q = static_cast<int>(std::ceil(nu_target * m - 1e-12));
  if (q >= m) return s_true;
  const auto& truth = s_true.indices();

  auto rng = make_engine(seed);
  std::vector<int> pos(static_cast<std::size_t>(m));
  std::iota(pos.begin(), pos.end(), 0);
  for (int i = 0; i < q; ++i) {
    std::uniform_int_distribution<int> pick(i, m - 1);
    std::swap(pos[static_cast<std::size_t>(i)],
              pos[static_cast<std::size_t>(pick(rng))]);
  }
  std::vector<int> fixed(pos.begin(), pos.begin() + q);
  std::sort(fixed.begin(), fixed.end());

  std::vector<int> result(static_cast<std::size_t>(m), -1);
  for (int p : fixed)
    result[static_cast<std::size_t>(p)] = truth[static_cast<std::size_t>(p)];

  std::vector<int> anchors = fixed;
  anchors.push_back(m);
  int cursor = 0;
  int lo_index = -1;
  for (int anchor : anchors) {
    const int len = anchor - cursor;
    const int hi_index =
        anchor < m ? truth[static_cast<std::size_t>(anchor)] : n;
    if (len > 0) {
      const int range = hi_index - lo_index - 1;  // >= len by construction
      std::vector<int> cand(static_cast<std::size_t>(range));
      std::iota(cand.begin(), cand.end(), lo_index + 1);
      for (int i = 0; i < len; ++i) {
        std::uniform_int_distribution<int> pick(i, range - 1);
        std::swap(cand[static_cast<std::size_t>(i)],
                  cand[static_cast<std::size_t>(pick(rng))]);
      }
      std::sort(cand.begin(), cand.begin() + len);
      for (int i = 0; i < len; ++i)
        result[static_cast<std::size_t>(cursor + i)] =
            cand[static_cast<std::size_t>(i)];
    }
    if (anchor < m) lo_index = truth[static_cast<std::size_t>(anchor)];
    cursor = anchor + 1;
  }
  return OrderedSelection(std::move(result), n);
}

struct RestartConfig {
  int max_restarts = 1;
  double eta = 3.0;
  AltMinConfig run;
};

/// Runs the solver until a run certifies or the restart budget is spent.
/// The first run may use a caller-supplied initialization; every further run
/// draws a fresh uniform selection from its derived stream. Singular systems
/// count as failed runs, not crashes. Returns the best-cost report seen,
/// flagged certified or not.
inline SolveReport solve_with_restarts(
    const UosInstance& inst, const RestartConfig& cfg, std::uint64_t seed,
    std::optional<OrderedSelection> first_init = std::nullopt) {
  if (cfg.max_restarts < 1)
    throw std::invalid_argument("solve_with_restarts: max_restarts must be >= 1");

  std::optional<SolveReport> best;
  for (int r = 0; r < cfg.max_restarts; ++r) {
    OrderedSelection init = [&] {
      if (r == 0 && first_init) return *first_init;
      auto rng = make_engine(derive_seed(seed, 0x72657374u, r));
      return OrderedSelection::random(inst.m(), inst.n(), rng);
    }();
    try {
      SolveReport report = altmin_solve(inst, init, cfg.run);
      report.restarts_used = r + 1;
      report.certified = certify(report, inst, cfg.eta);
      if (!best || report.cost < best->cost) best = report;
      if (report.certified) {
        best = report;
        break;
      }
    } catch (const SingularSystemError&) {
      continue;  // failed run; try the next initialization
    }
  }
  if (!best) {
    // Every run failed on a singular system.
    SolveReport failed(OrderedSelection::first_m(inst.m(), inst.n()),
                       Eigen::VectorXd::Zero(inst.k()));
    failed.reason = Termination::failed;
    failed.cost = std::numeric_limits<double>::infinity();
    failed.residual = std::numeric_limits<double>::infinity();
    failed.restarts_used = cfg.max_restarts;
    return failed;
  }
  return *best;
}

}  // namespace uos
