#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "uos/altmin.hpp"
#include "uos/instance.hpp"
#include "uos/parallel.hpp"
#include "uos/rng.hpp"

namespace uos {

/// Success rule: relative squared error within threshold_factor / snr.
/// Noiseless instances use a 1e-10 absolute bar instead.
inline bool trial_success(const UosInstance& inst, const SolveReport& report,
                          double threshold_factor) {
  if (report.reason == Termination::failed) return false;
  const double denom = inst.y_true.squaredNorm();
  if (denom <= 0.0) return false;
  const double rel_err = (inst.y_true - report.y).squaredNorm() / denom;
  if (inst.noiseless()) return rel_err <= 1e-10;
  return rel_err <= threshold_factor / inst.snr;
}

enum class InitMode { random_init, genie };

struct SweepConfig {
  int n = 200;
  std::vector<double> kappas;  // k = round(kappa * n)
  std::vector<double> rhos;    // m = round(rho * n)
  int trials = 100;
  std::optional<double> snr_db = 20.0;
  InitMode init = InitMode::random_init;
  double genie_nu = 0.2;
  double threshold_factor = 10.0;
  AltMinConfig solver;
  std::uint64_t master_seed = 0;
  int threads = 0;
};

struct CellResult {
  double kappa = 0.0;
  double rho = 0.0;
  int k = 0;
  int m = 0;
  bool skipped = false;  // infeasible geometry (k > m or k < 1), not a zero rate
  int successes = 0;
  int trials = 0;
  double rate = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  SweepConfig config;
  // cells[r][c] corresponds to (rhos[r], kappas[c]).
  std::vector<std::vector<CellResult>> cells;
  double wall_seconds = 0.0;

  const CellResult& cell(int rho_index, int kappa_index) const {
    return cells[static_cast<std::size_t>(rho_index)]
                [static_cast<std::size_t>(kappa_index)];
  }
};

namespace detail {

// Stream tags for the per-trial substreams. The measurement matrix draws
// from its own stream so a convolution-matrix sweep and a Gaussian sweep on
// the same master seed share the signal, selection and noise of every trial
// and differ in B alone.
constexpr std::uint64_t kStreamInstance = 1;
constexpr std::uint64_t kStreamInit = 2;
constexpr std::uint64_t kStreamMatrix = 3;

inline bool run_one_trial(const SweepConfig& cfg, int cell_id, int trial,
                          const Eigen::MatrixXd& b, int m) {
  const std::uint64_t inst_seed =
      derive_seed(cfg.master_seed, cell_id, trial, kStreamInstance);
  const std::uint64_t init_seed =
      derive_seed(cfg.master_seed, cell_id, trial, kStreamInit);
  UosInstance inst = make_instance_with_matrix(b, m, cfg.snr_db, inst_seed);
  OrderedSelection init = [&] {
    // Genie sweeps copy the prescribed fraction of true rows and fill the
    // rest randomly, so coincidental extra agreement counts (similarity is
    // at least genie_nu, matching the construction behind the genie-aided
    // success maps).
    if (cfg.init == InitMode::genie)
      return genie_init_copy_rows(inst.s_true, cfg.genie_nu, init_seed);
    auto rng = make_engine(init_seed);
    return OrderedSelection::random(m, cfg.n, rng);
  }();
  try {
    SolveReport report = altmin_solve(inst, init, cfg.solver);
    return trial_success(inst, report, cfg.threshold_factor);
  } catch (const SingularSystemError&) {
    return false;
  }
}

// Shared sweep driver; make_b builds the per-trial measurement matrix from
// its dedicated stream.
inline SweepResult run_sweep(
    const SweepConfig& cfg,
    const std::function<Eigen::MatrixXd(int k, std::uint64_t seed)>& make_b) {
  if (cfg.kappas.empty() || cfg.rhos.empty())
    throw std::invalid_argument("sweep: empty grid");
  if (cfg.trials < 1)
    throw std::invalid_argument("sweep: trials must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  const int num_rho = static_cast<int>(cfg.rhos.size());
  const int num_kappa = static_cast<int>(cfg.kappas.size());
  SweepResult result;
  result.config = cfg;
  result.cells.assign(static_cast<std::size_t>(num_rho),
                      std::vector<CellResult>(static_cast<std::size_t>(num_kappa)));

  struct Item {
    int r, c, cell_id, trial;
    int k, m;
  };
  std::vector<Item> items;
  for (int r = 0; r < num_rho; ++r) {
    for (int c = 0; c < num_kappa; ++c) {
      CellResult& cell = result.cells[static_cast<std::size_t>(r)]
                                     [static_cast<std::size_t>(c)];
      cell.kappa = cfg.kappas[static_cast<std::size_t>(c)];
      cell.rho = cfg.rhos[static_cast<std::size_t>(r)];
      cell.k = static_cast<int>(std::lround(cell.kappa * cfg.n));
      cell.m = static_cast<int>(std::lround(cell.rho * cfg.n));
      const int cell_id = r * num_kappa + c;
      if (cell.k < 1 || cell.m < cell.k || cell.m > cfg.n) {
        cell.skipped = true;
        continue;
      }
      cell.trials = cfg.trials;
      for (int t = 0; t < cfg.trials; ++t)
        items.push_back(Item{r, c, cell_id, t, cell.k, cell.m});
    }
  }

  std::vector<unsigned char> successes(items.size(), 0);
  parallel_for(static_cast<int>(items.size()), cfg.threads, [&](int i) {
    const Item& it = items[static_cast<std::size_t>(i)];
    Eigen::MatrixXd b = make_b(
        it.k, derive_seed(cfg.master_seed, it.cell_id, it.trial, kStreamMatrix));
    successes[static_cast<std::size_t>(i)] =
        run_one_trial(cfg, it.cell_id, it.trial, b, it.m) ? 1 : 0;
  });

  for (std::size_t i = 0; i < items.size(); ++i) {
    const Item& it = items[i];
    if (successes[i])
      ++result.cells[static_cast<std::size_t>(it.r)]
                    [static_cast<std::size_t>(it.c)]
                        .successes;
  }
  for (auto& row : result.cells)
    for (auto& cell : row)
      if (!cell.skipped)
        cell.rate = static_cast<double>(cell.successes) / cell.trials;

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace detail

/// Success-probability sweep over the (kappa, rho) grid with Gaussian B,
/// fresh (B, y, S, w) per trial. Deterministic for a fixed master seed
/// regardless of thread count or scheduling.
inline SweepResult phase_sweep(const SweepConfig& cfg) {
  const int n = cfg.n;
  return detail::run_sweep(cfg, [n](int k, std::uint64_t seed) {
    return gaussian_matrix(n, k, seed);
  });
}

/// Banded convolution matrix of a training sequence b: n = k + tau - 1 rows,
/// B(l, t) = b[l - t] with zeros outside [0, tau). B y is the convolution
/// b * y.
inline Eigen::MatrixXd build_convolution_matrix(const Eigen::VectorXd& b,
                                                int k) {
  const int tau = static_cast<int>(b.size());
  if (tau < 1)
    throw std::invalid_argument(
        "build_convolution_matrix: training sequence must be nonempty");
  if (k < 1)
    throw std::invalid_argument("build_convolution_matrix: k must be >= 1");
  const int n = k + tau - 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, k);
  for (int l = 0; l < n; ++l)
    for (int t = 0; t < k; ++t) {
      const int r = l - t;
      if (r >= 0 && r < tau) out(l, t) = b[r];
    }
  return out;
}

/// Training sequence, impulse response and the induced convolution matrix of
/// one system-identification scenario.
struct SysIdSetup {
  Eigen::VectorXd b;  // training sequence, length tau
  Eigen::VectorXd y;  // impulse response, length k
  Eigen::MatrixXd B;  // (k + tau - 1) x k convolution matrix

  int tau() const { return static_cast<int>(b.size()); }
  int k() const { return static_cast<int>(y.size()); }
  int n() const { return k() + tau() - 1; }
};

inline SysIdSetup make_sysid_setup(Eigen::VectorXd b, Eigen::VectorXd y) {
  SysIdSetup setup{std::move(b), std::move(y), Eigen::MatrixXd()};
  setup.B = build_convolution_matrix(setup.b, setup.k());
  return setup;
}

struct SysIdResult {
  SweepResult sysid;     // convolution-matrix rates
  SweepResult gaussian;  // Gaussian-B rates on the same seeds
};

/// System-identification sweep: per trial the measurement matrix is the
/// convolution matrix of an i.i.d. Gaussian training sequence of length
/// tau = n - k + 1. A Gaussian-B sweep on identical per-trial signal,
/// selection and noise streams runs alongside for the cellwise comparison.
inline SysIdResult sysid_sweep(const SweepConfig& cfg) {
  const int n = cfg.n;
  const auto make_conv = [n](int k, std::uint64_t seed) {
    const int tau = n - k + 1;
    auto rng = make_engine(seed);
    return build_convolution_matrix(gaussian_vector(tau, rng), k);
  };
  return SysIdResult{detail::run_sweep(cfg, make_conv),
                     phase_sweep(cfg)};
}

}  // namespace uos
