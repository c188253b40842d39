// Command-line front end: solves single instances, runs phase-transition and
// system-identification sweeps, samples isometry constants, and emits the
// analysis curves. All outputs are CSV/JSON files; exit code 0 means success,
// 1 a usage or configuration error, 2 an in-regime computational failure
// (uncertified solve, out-of-regime parameters, sampling starvation).

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "uos/uos.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitComputational = 2;

struct CommonOptions {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  std::string config_path;
};

// Flag > config file > built-in default. The config file is a JSON object
// keyed by subcommand, each holding option-name/value pairs.
json load_config_section(const std::string& path, const std::string& section) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json root = json::parse(in, nullptr, true, true);
  if (root.contains(section)) return root.at(section);
  return json::object();
}

template <typename T>
void fallback(const CLI::App& cmd, const std::string& flag, const json& cfg,
              const std::string& key, T& value) {
  if (cmd.count(flag) == 0 && cfg.contains(key)) value = cfg.at(key).get<T>();
}

std::uint64_t resolve_seed(const CommonOptions& common, const json& cfg) {
  if (common.seed_given) return common.seed;
  if (cfg.contains("seed")) return cfg.at("seed").get<std::uint64_t>();
  if (const char* env = std::getenv("UOS_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return common.seed;
}

std::optional<double> parse_snr(const std::string& text) {
  if (text == "noiseless") return std::nullopt;
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size())
    throw CLI::ValidationError("--snr", "expected a dB value or 'noiseless'");
  return value;
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(dir);
  uos::write_text_file((dir / name).string(), content);
}

std::vector<double> default_grid_axis() {
  std::vector<double> axis;
  for (int i = 0; i < 19; ++i) axis.push_back(0.05 * (i + 1));
  return axis;
}

struct SolveOptions {
  int n = 40, m = 36, k = 2;
  std::string snr = "noiseless";
  std::string init = "random";
  int restarts = 1;
  double eta = 3.0;
  int max_iter = 100;
  double cost_tol = 1e-10;
};

int run_solve(const SolveOptions& opt, const CommonOptions& common,
              std::uint64_t seed) {
  if (opt.k > opt.m) {
    std::cerr << "solve: k must not exceed m\n";
    return kExitUsage;
  }
  if (opt.m > opt.n) {
    std::cerr << "solve: m must not exceed n\n";
    return kExitUsage;
  }
  const std::optional<double> snr_db = parse_snr(opt.snr);
  uos::UosInstance inst =
      uos::make_instance(opt.n, opt.m, opt.k, snr_db, uos::derive_seed(seed, 1));

  std::optional<uos::OrderedSelection> first_init;
  if (opt.init.rfind("genie:", 0) == 0) {
    const double nu = std::stod(opt.init.substr(6));
    first_init = uos::genie_init(inst.s_true, nu, uos::derive_seed(seed, 2));
  } else if (opt.init == "random") {
    auto rng = uos::make_engine(uos::derive_seed(seed, 2));
    first_init = uos::OrderedSelection::random(opt.m, opt.n, rng);
  } else {
    std::cerr << "solve: --init must be 'random' or 'genie:<nu>'\n";
    return kExitUsage;
  }

  uos::RestartConfig cfg{opt.restarts, opt.eta,
                         uos::AltMinConfig{opt.max_iter, opt.cost_tol}};
  uos::SolveReport report =
      uos::solve_with_restarts(inst, cfg, uos::derive_seed(seed, 3), first_init);

  json doc{
      {"version", uos::kVersion},
      {"config",
       {{"n", opt.n},
        {"m", opt.m},
        {"k", opt.k},
        {"snr_db", snr_db ? json(*snr_db) : json(nullptr)},
        {"seed", seed},
        {"init", opt.init},
        {"max_restarts", opt.restarts},
        {"eta", opt.eta},
        {"max_iter", opt.max_iter},
        {"cost_tol", opt.cost_tol}}},
      {"instance",
       {{"snr_realized", inst.noiseless() ? json(nullptr) : json(inst.snr)},
        {"noise_norm", inst.w.norm()},
        {"observation_norm", inst.x.norm()}}},
      {"result", uos::to_json(report, &inst)},
  };
  write_file(common.out_dir, "solve_report.json", doc.dump(2) + "\n");
  return report.certified ? kExitOk : kExitComputational;
}

struct SweepOptions {
  int n = 200;
  std::vector<double> kappas;
  std::vector<double> rhos;
  int trials = 100;
  std::string snr = "20";
  std::string init = "random";
  double genie_nu = 0.2;
  double threshold_factor = 10.0;
  int max_iter = 100;
  double cost_tol = 1e-10;
};

uos::SweepConfig to_sweep_config(const SweepOptions& opt,
                                 const CommonOptions& common,
                                 std::uint64_t seed) {
  uos::SweepConfig cfg;
  cfg.n = opt.n;
  cfg.kappas = opt.kappas.empty() ? default_grid_axis() : opt.kappas;
  cfg.rhos = opt.rhos.empty() ? default_grid_axis() : opt.rhos;
  cfg.trials = opt.trials;
  cfg.snr_db = parse_snr(opt.snr);
  if (opt.init == "genie") {
    cfg.init = uos::InitMode::genie;
  } else if (opt.init == "random") {
    cfg.init = uos::InitMode::random_init;
  } else {
    throw CLI::ValidationError("--init", "must be 'random' or 'genie'");
  }
  cfg.genie_nu = opt.genie_nu;
  cfg.threshold_factor = opt.threshold_factor;
  cfg.solver = uos::AltMinConfig{opt.max_iter, opt.cost_tol};
  cfg.master_seed = seed;
  cfg.threads = common.threads;
  return cfg;
}

int run_phase(const SweepOptions& opt, const CommonOptions& common,
              std::uint64_t seed) {
  uos::SweepResult result = uos::phase_sweep(to_sweep_config(opt, common, seed));
  write_file(common.out_dir, "phase_heatmap.csv", uos::heatmap_csv(result));
  write_file(common.out_dir, "phase_manifest.json",
             uos::sweep_manifest(result, "phase").dump(2) + "\n");
  return kExitOk;
}

int run_sysid(const SweepOptions& opt, const CommonOptions& common,
              std::uint64_t seed) {
  uos::SysIdResult result = uos::sysid_sweep(to_sweep_config(opt, common, seed));
  write_file(common.out_dir, "sysid_heatmap.csv",
             uos::heatmap_csv(result.sysid));
  write_file(common.out_dir, "sysid_gaussian_heatmap.csv",
             uos::heatmap_csv(result.gaussian));
  write_file(common.out_dir, "sysid_comparison.csv",
             uos::sysid_comparison_csv(result));
  json manifest = uos::sweep_manifest(result.sysid, "sysid");
  manifest["gaussian_companion"] = uos::sweep_manifest(result.gaussian, "phase");
  write_file(common.out_dir, "sysid_manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

struct RipOptions {
  std::string mode = "H";
  int n = 100, m = 100, k = 5;
  double mu = 0.5;
  int trials = 1000;
  std::string region = "qualifying";
};

int run_rip(const RipOptions& opt, const CommonOptions& common,
            std::uint64_t seed) {
  Eigen::MatrixXd b =
      uos::gaussian_matrix(opt.n, opt.k, uos::derive_seed(seed, 1));
  uos::RipReport report;
  const char* mode_name;
  if (opt.mode == "H") {
    report = uos::check_rip_H(b, opt.m, opt.trials, uos::derive_seed(seed, 2));
    mode_name = "H";
  } else if (opt.mode == "HH") {
    const uos::PairRegion region = [&] {
      if (opt.region == "qualifying") return uos::PairRegion::qualifying;
      if (opt.region == "excluded") return uos::PairRegion::excluded;
      throw CLI::ValidationError("--region",
                                 "must be 'qualifying' or 'excluded'");
    }();
    report = uos::check_rrip(b, opt.m, opt.mu, opt.trials,
                             uos::derive_seed(seed, 2), region);
    mode_name = "HH";
  } else {
    std::cerr << "rip: --mode must be 'H' or 'HH'\n";
    return kExitUsage;
  }
  json doc = uos::to_json(report, mode_name);
  doc["seed"] = seed;
  doc["version"] = uos::kVersion;
  if (opt.mode == "HH") doc["region"] = opt.region;
  write_file(common.out_dir, "rip_report.json", doc.dump(2) + "\n");
  write_file(common.out_dir, "rip_trials.csv", uos::rip_trials_csv(report));
  return kExitOk;
}

struct AnalysisOptions {
  double varsigma = 0.0;
  double varrho = -1.0;
  double delta = 0.0;
  std::string snr = "20";
  double epsilon = 0.01;
  double nu_init = -1.0;
  int steps = 200;
  int grid_points = 1000;
};

int run_analysis(const AnalysisOptions& opt, const CLI::App& cmd,
                 const CommonOptions& common) {
  uos::FixedPointParams params = [&] {
    if (cmd.count("--varsigma") || cmd.count("--varrho")) {
      if (!(cmd.count("--varsigma") && cmd.count("--varrho")))
        throw CLI::ValidationError(
            "--varsigma", "provide both --varsigma and --varrho together");
      return uos::FixedPointParams::from_sigma_rho(opt.varsigma, opt.varrho);
    }
    if (!cmd.count("--delta"))
      throw CLI::ValidationError(
          "--delta", "provide either (--varsigma, --varrho) or --delta");
    const auto snr_db = parse_snr(opt.snr);
    if (!snr_db)
      throw CLI::ValidationError("--snr",
                                 "analysis needs a finite snr in dB");
    return uos::FixedPointParams::from_rip(
        opt.delta, std::pow(10.0, *snr_db / 10.0), opt.epsilon);
  }();

  const auto curve = uos::envelope_curve(params, opt.grid_points);
  write_file(common.out_dir, "envelope.csv",
             uos::curve_csv("nu", "F0", curve.nu_grid, curve.f0));

  std::vector<double> alphas, values;
  const double lo = 1e-3, hi = std::numbers::pi / 2.0 - 1e-3;
  for (int i = 0; i <= opt.grid_points; ++i) {
    const double a = lo + (hi - lo) * i / opt.grid_points;
    alphas.push_back(a);
    values.push_back(uos::upsilon(a, params));
  }
  write_file(common.out_dir, "upsilon.csv",
             uos::curve_csv("alpha", "upsilon", alphas, values));

  json fixed = uos::fixed_points_json(params);
  fixed["version"] = uos::kVersion;
  write_file(common.out_dir, "fixedpoints.json", fixed.dump(2) + "\n");

  double nu_start = opt.nu_init;
  if (nu_start < 0.0) {
    // default: just above the repelling fixed point when it exists
    nu_start = 0.5;
    if (fixed.contains("noisy") && fixed["noisy"]["exists"].get<bool>())
      nu_start = fixed["noisy"]["nu_min"].get<double>() + 0.01;
    else if (fixed.contains("noiseless") &&
             fixed["noiseless"]["in_regime"].get<bool>())
      nu_start = fixed["noiseless"]["nu_min"].get<double>() + 0.01;
    nu_start = std::min(nu_start, 1.0);
  }
  const auto trace = uos::evolve(params, nu_start, opt.steps);
  write_file(common.out_dir, "evolution.csv", uos::evolution_csv(trace));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unlabeled ordered sampling toolkit"};
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--out", common.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", common.seed,
                                  "master seed (fallback: UOS_SEED env var)");
  app.add_option("--threads", common.threads,
                 "worker threads (0 = hardware)");
  app.add_option("--config", common.config_path,
                 "JSON config file with per-subcommand defaults");

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "recover one instance");
  solve->add_option("--n", solve_opt.n, "ambient dimension");
  solve->add_option("--m", solve_opt.m, "number of kept samples");
  solve->add_option("--k", solve_opt.k, "signal dimension");
  solve->add_option("--snr", solve_opt.snr, "snr in dB or 'noiseless'");
  solve->add_option("--init", solve_opt.init, "random | genie:<nu>");
  solve->add_option("--restarts", solve_opt.restarts, "restart budget");
  solve->add_option("--eta", solve_opt.eta, "certificate radius factor");
  solve->add_option("--max-iter", solve_opt.max_iter, "iteration budget");
  solve->add_option("--cost-tol", solve_opt.cost_tol, "stall tolerance");

  SweepOptions phase_opt;
  CLI::App* phase = app.add_subcommand("phase", "success-probability sweep");
  SweepOptions sysid_opt;
  CLI::App* sysid =
      app.add_subcommand("sysid", "system-identification sweep");
  for (auto [cmd, opt] : {std::pair{phase, &phase_opt}, {sysid, &sysid_opt}}) {
    cmd->add_option("--n", opt->n, "ambient dimension");
    cmd->add_option("--kappas", opt->kappas, "kappa grid values")
        ->delimiter(',');
    cmd->add_option("--rhos", opt->rhos, "rho grid values")->delimiter(',');
    cmd->add_option("--trials", opt->trials, "trials per cell");
    cmd->add_option("--snr", opt->snr, "snr in dB or 'noiseless'");
    cmd->add_option("--init", opt->init, "random | genie");
    cmd->add_option("--genie-nu", opt->genie_nu, "copied-row fraction");
    cmd->add_option("--threshold-factor", opt->threshold_factor,
                    "success threshold factor");
    cmd->add_option("--max-iter", opt->max_iter, "iteration budget");
    cmd->add_option("--cost-tol", opt->cost_tol, "stall tolerance");
  }

  RipOptions rip_opt;
  CLI::App* rip = app.add_subcommand("rip", "sample isometry constants");
  rip->add_option("--mode", rip_opt.mode, "H | HH");
  rip->add_option("--n", rip_opt.n, "ambient dimension");
  rip->add_option("--m", rip_opt.m, "number of kept samples");
  rip->add_option("--k", rip_opt.k, "signal dimension");
  rip->add_option("--mu", rip_opt.mu, "pair-distance precision (HH)");
  rip->add_option("--trials", rip_opt.trials, "sampled trials");
  rip->add_option("--region", rip_opt.region, "qualifying | excluded (HH)");

  AnalysisOptions ana_opt;
  CLI::App* analysis =
      app.add_subcommand("analysis", "fixed-point curves and landmarks");
  analysis->add_option("--varsigma", ana_opt.varsigma, "distortion parameter");
  analysis->add_option("--varrho", ana_opt.varrho, "noise parameter");
  analysis->add_option("--delta", ana_opt.delta, "isometry constant");
  analysis->add_option("--snr", ana_opt.snr, "snr in dB");
  analysis->add_option("--epsilon", ana_opt.epsilon, "single-signal constant");
  analysis->add_option("--nu-init", ana_opt.nu_init,
                       "evolution start (default: nu_min + 0.01)");
  analysis->add_option("--steps", ana_opt.steps, "evolution steps");
  analysis->add_option("--grid-points", ana_opt.grid_points,
                       "curve grid resolution");

  CLI::App* version = app.add_subcommand("version", "print version");

  // global options (--out, --seed, ...) may follow the subcommand name
  for (CLI::App* cmd : app.get_subcommands({}))
    cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    common.seed_given = seed_opt->count() > 0;
    if (version->parsed()) {
      std::cout << "uos " << uos::kVersion << "\n";
      return kExitOk;
    }
    if (solve->parsed()) {
      const json cfg = load_config_section(common.config_path, "solve");
      fallback(*solve, "--n", cfg, "n", solve_opt.n);
      fallback(*solve, "--m", cfg, "m", solve_opt.m);
      fallback(*solve, "--k", cfg, "k", solve_opt.k);
      fallback(*solve, "--snr", cfg, "snr", solve_opt.snr);
      fallback(*solve, "--init", cfg, "init", solve_opt.init);
      fallback(*solve, "--restarts", cfg, "restarts", solve_opt.restarts);
      fallback(*solve, "--eta", cfg, "eta", solve_opt.eta);
      fallback(*solve, "--max-iter", cfg, "max_iter", solve_opt.max_iter);
      fallback(*solve, "--cost-tol", cfg, "cost_tol", solve_opt.cost_tol);
      return run_solve(solve_opt, common, resolve_seed(common, cfg));
    }
    if (phase->parsed() || sysid->parsed()) {
      const bool is_phase = phase->parsed();
      CLI::App* cmd = is_phase ? phase : sysid;
      SweepOptions& opt = is_phase ? phase_opt : sysid_opt;
      const json cfg = load_config_section(common.config_path,
                                           is_phase ? "phase" : "sysid");
      fallback(*cmd, "--n", cfg, "n", opt.n);
      fallback(*cmd, "--kappas", cfg, "kappas", opt.kappas);
      fallback(*cmd, "--rhos", cfg, "rhos", opt.rhos);
      fallback(*cmd, "--trials", cfg, "trials", opt.trials);
      fallback(*cmd, "--snr", cfg, "snr", opt.snr);
      fallback(*cmd, "--init", cfg, "init", opt.init);
      fallback(*cmd, "--genie-nu", cfg, "genie_nu", opt.genie_nu);
      fallback(*cmd, "--threshold-factor", cfg, "threshold_factor",
               opt.threshold_factor);
      fallback(*cmd, "--max-iter", cfg, "max_iter", opt.max_iter);
      fallback(*cmd, "--cost-tol", cfg, "cost_tol", opt.cost_tol);
      const std::uint64_t seed = resolve_seed(common, cfg);
      return is_phase ? run_phase(opt, common, seed)
                      : run_sysid(opt, common, seed);
    }
    if (rip->parsed()) {
      const json cfg = load_config_section(common.config_path, "rip");
      fallback(*rip, "--mode", cfg, "mode", rip_opt.mode);
      fallback(*rip, "--n", cfg, "n", rip_opt.n);
      fallback(*rip, "--m", cfg, "m", rip_opt.m);
      fallback(*rip, "--k", cfg, "k", rip_opt.k);
      fallback(*rip, "--mu", cfg, "mu", rip_opt.mu);
      fallback(*rip, "--trials", cfg, "trials", rip_opt.trials);
      fallback(*rip, "--region", cfg, "region", rip_opt.region);
      return run_rip(rip_opt, common, resolve_seed(common, cfg));
    }
    if (analysis->parsed()) {
      const json cfg = load_config_section(common.config_path, "analysis");
      fallback(*analysis, "--varsigma", cfg, "varsigma", ana_opt.varsigma);
      fallback(*analysis, "--varrho", cfg, "varrho", ana_opt.varrho);
      fallback(*analysis, "--delta", cfg, "delta", ana_opt.delta);
      fallback(*analysis, "--snr", cfg, "snr", ana_opt.snr);
      fallback(*analysis, "--epsilon", cfg, "epsilon", ana_opt.epsilon);
      fallback(*analysis, "--nu-init", cfg, "nu_init", ana_opt.nu_init);
      fallback(*analysis, "--steps", cfg, "steps", ana_opt.steps);
      fallback(*analysis, "--grid-points", cfg, "grid_points",
               ana_opt.grid_points);
      return run_analysis(ana_opt, *analysis, common);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const uos::ConditionViolatedError& e) {
    std::cerr << "out of regime: " << e.what() << "\n";
    return kExitComputational;
  } catch (const uos::OutOfRegimeError& e) {
    std::cerr << "out of regime: " << e.what() << "\n";
    return kExitComputational;
  } catch (const uos::SamplingFailureError& e) {
    std::cerr << "sampling failure: " << e.what() << "\n";
    return kExitComputational;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
