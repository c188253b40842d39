#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uos/altmin.hpp"
#include "uos/analysis.hpp"
#include "uos/experiments.hpp"
#include "uos/rip.hpp"

namespace uos {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal form, C locale semantics regardless of the
/// process locale; used for every number written to CSV.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string heatmap_csv(const SweepResult& result) {
  std::string csv = "rho\\kappa";
  for (double kappa : result.config.kappas)
    csv += "," + format_double(kappa);
  csv += "\n";
  for (std::size_t r = 0; r < result.cells.size(); ++r) {
    csv += format_double(result.config.rhos[r]);
    for (const CellResult& cell : result.cells[r])
      csv += "," + (cell.skipped ? std::string("nan") : format_double(cell.rate));
    csv += "\n";
  }
  return csv;
}

inline std::string sysid_comparison_csv(const SysIdResult& result) {
  std::string csv = "rho,kappa,sysid_rate,gaussian_rate,abs_diff\n";
  for (std::size_t r = 0; r < result.sysid.cells.size(); ++r) {
    for (std::size_t c = 0; c < result.sysid.cells[r].size(); ++c) {
      const CellResult& sc = result.sysid.cells[r][c];
      const CellResult& gc = result.gaussian.cells[r][c];
      csv += format_double(sc.rho) + "," + format_double(sc.kappa) + ",";
      if (sc.skipped || gc.skipped) {
        csv += "nan,nan,nan\n";
      } else {
        csv += format_double(sc.rate) + "," + format_double(gc.rate) + "," +
               format_double(std::abs(sc.rate - gc.rate)) + "\n";
      }
    }
  }
  return csv;
}

inline std::string rip_trials_csv(const RipReport& report) {
  std::string csv = "trial,ratio,d,nu,norm_h,norm_h_prime\n";
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const RipTrialRow& row = report.trials[i];
    csv += std::to_string(i) + "," + format_double(row.ratio) + "," +
           format_double(row.d) + "," + format_double(row.nu) + "," +
           format_double(row.norm_h) + "," + format_double(row.norm_h_prime) +
           "\n";
  }
  return csv;
}

inline std::string curve_csv(const std::string& x_name,
                             const std::string& y_name,
                             const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  std::string csv = x_name + "," + y_name + "\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    csv += format_double(xs[i]) + "," + format_double(ys[i]) + "\n";
  return csv;
}

inline std::string evolution_csv(const EvolutionTrace& trace) {
  std::string csv = "t,nu\n";
  for (std::size_t i = 0; i < trace.nu.size(); ++i)
    csv += std::to_string(i) + "," + format_double(trace.nu[i]) + "\n";
  return csv;
}

// --- JSON shapes -----------------------------------------------------------

inline nlohmann::json to_json(const OrderedSelection& s) {
  return nlohmann::json{{"n", s.n()}, {"indices", s.indices()}};
}

inline nlohmann::json to_json(const SolveReport& report,
                              const UosInstance* inst = nullptr) {
  nlohmann::json trace = nlohmann::json::array();
  for (const IterationRecord& rec : report.trace) {
    trace.push_back({{"iteration", rec.iteration},
                     {"cost_after_signal", rec.cost_after_signal},
                     {"cost_after_selection", rec.cost_after_selection},
                     {"nu", rec.nu},
                     {"xi", rec.xi},
                     {"theta", rec.theta}});
  }
  nlohmann::json j{
      {"certified", report.certified},
      {"cost", report.cost},
      {"residual", report.residual},
      {"iterations", report.iterations},
      {"restarts_used", report.restarts_used},
      {"termination", to_string(report.reason)},
      {"s_hat", to_json(report.s)},
      {"y_hat", std::vector<double>(report.y.data(),
                                    report.y.data() + report.y.size())},
      {"trace", trace},
      {"nu_final", report.nu_final()},
  };
  if (inst) {
    const double denom = inst->y_true.squaredNorm();
    j["relative_error"] =
        denom > 0 ? (inst->y_true - report.y).squaredNorm() / denom
                  : std::numeric_limits<double>::quiet_NaN();
  }
  return j;
}

inline nlohmann::json to_json(const RipReport& report, const char* mode) {
  nlohmann::json j{{"mode", mode},
                   {"constant_hat", report.constant_hat},
                   {"mean_ratio", report.mean_ratio},
                   {"num_samples", report.num_samples},
                   {"acceptance_rate", report.acceptance_rate},
                   {"params",
                    {{"n", report.n}, {"m", report.m}, {"k", report.k}}}};
  if (!std::isnan(report.mu)) j["params"]["mu"] = report.mu;
  return j;
}

inline nlohmann::json sweep_manifest(const SweepResult& result,
                                     const std::string& command) {
  const SweepConfig& cfg = result.config;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& row : result.cells)
    for (const CellResult& cell : row) {
      nlohmann::json jc{{"rho", cell.rho},     {"kappa", cell.kappa},
                        {"k", cell.k},         {"m", cell.m},
                        {"skipped", cell.skipped}};
      if (!cell.skipped) {
        jc["successes"] = cell.successes;
        jc["trials"] = cell.trials;
        jc["rate"] = cell.rate;
      }
      cells.push_back(jc);
    }
  nlohmann::json j{
      {"command", command},
      {"version", kVersion},
      {"master_seed", cfg.master_seed},
      {"wall_seconds", result.wall_seconds},
      {"stream_scheme",
       "splitmix64 chain: derive_seed(master, cell_id, trial, part); "
       "cell_id = rho_index * num_kappa + kappa_index; part: 1 = instance, "
       "2 = init, 3 = measurement matrix"},
      {"config",
       {{"n", cfg.n},
        {"kappas", cfg.kappas},
        {"rhos", cfg.rhos},
        {"trials", cfg.trials},
        {"snr_db", cfg.snr_db ? nlohmann::json(*cfg.snr_db)
                              : nlohmann::json(nullptr)},
        {"init", cfg.init == InitMode::genie ? "genie" : "random"},
        {"genie_nu", cfg.genie_nu},
        {"threshold_factor", cfg.threshold_factor},
        {"max_iter", cfg.solver.max_iter},
        {"cost_tol", cfg.solver.cost_tol},
        {"threads", cfg.threads}}},
      {"cells", cells}};
  return j;
}

inline nlohmann::json fixed_points_json(const FixedPointParams& p) {
  nlohmann::json j{{"varsigma", p.varsigma}, {"varrho", p.varrho}};
  if (p.delta) j["delta"] = *p.delta;
  if (p.zeta) j["zeta"] = *p.zeta;
  j["nu0"] = nu0(p);
  j["f_max"] = f_max(p);
  const auto n1 = nu1(p);
  j["nu1"] = n1 ? nlohmann::json(*n1) : nlohmann::json(nullptr);
  if (p.varrho == 0.0) {
    if (p.varsigma > 1.0 && p.varsigma <= std::numbers::sqrt2) {
      const auto fp = noiseless_fixed_points(p.varsigma);
      j["noiseless"] = {{"in_regime", true},
                        {"nu_min", fp.nu_min},
                        {"nu_max", fp.nu_max}};
    } else {
      j["noiseless"] = {{"in_regime", false}};
    }
  } else {
    const auto fp = noisy_fixed_points(p);
    if (fp) {
      j["noisy"] = {{"exists", true},
                    {"nu_min", fp->nu_min},
                    {"nu_max", fp->nu_max},
                    {"alpha_min", fp->alpha_min},
                    {"alpha_max", fp->alpha_max}};
    } else {
      j["noisy"] = {{"exists", false}};
    }
  }
  return j;
}

}  // namespace uos
