// transcal: simulate migration data, calibrate transition models, emit
// likelihood profiles and scenario studies.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "transcal/transcal.hpp"

namespace fs = std::filesystem;
using namespace transcal;

namespace {

constexpr int kUsageError = 2;
constexpr int kNumericalError = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string method;
  std::optional<std::size_t> particles;
  int workers = 0;
  std::string out;
};

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write '" + p.string() + "'");
  return os;
}

nlohmann::json manifest(const std::string& command, const RunConfig& cfg, std::uint64_t seed) {
  nlohmann::json m;
  m["tool"] = "transcal";
  m["version"] = TRANSCAL_VERSION;
  m["command"] = command;
  m["seed"] = seed;
  m["config"] = cfg.raw;
  return m;
}

nlohmann::json parameters_json(const ModelFamily& family, const ModelParameters& psi) {
  nlohmann::json j;
  j["family"] = to_string(family.kind);
  std::vector<std::vector<double>> levels;
  for (Eigen::Index i = 0; i < psi.levels.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index c = 0; c < psi.levels.cols(); ++c) row.push_back(psi.levels(i, c));
    levels.push_back(row);
  }
  j["levels"] = levels;
  std::vector<double> a, k;
  for (Eigen::Index m = 0; m < psi.ar.rows(); ++m) a.push_back(psi.ar(m, m));
  for (Eigen::Index m = 0; m < psi.loadings.rows(); ++m) k.push_back(psi.loadings(m, std::min(m, psi.loadings.cols() - 1)));
  j["a"] = a;
  j["k"] = k;
  j["rho"] = psi.rho;
  return j;
}

RunConfig require_config(const CommonFlags& f) {
  if (f.config.empty()) throw ConfigError("--config is required");
  return load_config(f.config);
}

int cmd_simulate(const CommonFlags& f) {
  RunConfig cfg = require_config(f);
  if (!cfg.truth) throw ConfigError("missing key 'truth'");
  if (!cfg.populations) throw ConfigError("missing key 'populations'");
  const std::uint64_t seed = f.seed.value_or(cfg.seed);
  std::mt19937_64 rng(seed);
  SimulatedScenario sc = simulate_migrations(cfg.family, *cfg.truth, *cfg.populations, cfg.periods, rng,
                                             ObservedFactors::zeros(cfg.periods), cfg.renormalize);
  const fs::path out = f.out.empty() ? fs::path("simulated") : fs::path(f.out);
  fs::create_directories(out);
  {
    auto os = open_out(out / "migrations.csv");
    write_migrations(os, sc.series, cfg.scheme);
  }
  {
    auto os = open_out(out / "latent.csv");
    write_factor_file(os, sc.latent.x);
  }
  auto m = manifest("simulate", cfg, seed);
  m["truth"] = parameters_json(cfg.family, *cfg.truth);
  m["periods"] = cfg.periods;
  auto os = open_out(out / "manifest.json");
  os << m.dump(2) << '\n';
  std::cout << "wrote " << cfg.periods << " periods to " << out.string() << '\n';
  return 0;
}

int cmd_calibrate(const CommonFlags& f, const std::string& data) {
  RunConfig cfg = require_config(f);
  const std::string method = f.method.empty() ? cfg.method : f.method;
  const StudyMethod sm = study_method_from_string(method);
  MigrationSeries series = read_migrations(data, &cfg.scheme);
  ValidationReport report = validate_series(series, cfg.scheme);
  if (!report.ok()) throw ConfigError("invalid migration data: " + report.violations.front());
  const ObservedFactors u = ObservedFactors::zeros(series.period_count());
  const std::uint64_t seed = f.seed.value_or(cfg.seed);
  const fs::path out = f.out.empty() ? fs::path("calibration") : fs::path(f.out);
  fs::create_directories(out);
  const LongRunAverages avg = long_run_averages(series);
  MLEOptions mle;
  mle.laplace = cfg.laplace;
  const Vector start = cfg.start ? *cfg.start : default_start(cfg.family);

  nlohmann::json report_json = manifest("calibrate", cfg, seed);
  report_json["method"] = method;
  report_json["data"] = data;
  std::vector<Vector> latent;
  switch (sm) {
    case StudyMethod::Laplace: {
      MLEResult r = mle_laplace(cfg.family, series, u, parameters_from_free(cfg.family, avg, start), mle);
      for (std::size_t i = 0; i < r.names.size(); ++i) report_json["estimate"][r.names[i]] = r.estimate(static_cast<Eigen::Index>(i));
      report_json["loglik"] = r.loglik_at_opt;
      report_json["evaluations"] = r.evaluations;
      report_json["psi_hat"] = parameters_json(cfg.family, r.psi_hat);
      LaplaceLikelihood ll = laplace_loglik(cfg.family, series, r.psi_hat, u, cfg.laplace);
      report_json["mode_iterations"] = ll.mode.iterations;
      report_json["mode_grad_norm"] = ll.mode.grad_norm;
      latent = r.latent_estimates.x;
      break;
    }
    case StudyMethod::Stepwise: {
      if (cfg.family.kind != FamilyKind::TwoFactorProbit) throw ConfigError("stepwise calibration needs model.family two-factor-probit");
      StepwiseResult r = stepwise_calibrate(series, u, mle);
      for (std::size_t i = 0; i < r.names.size(); ++i) report_json["estimate"][r.names[i]] = r.estimate(static_cast<Eigen::Index>(i));
      report_json["loglik_default"] = r.default_fit.loglik_at_opt;
      report_json["loglik_performing"] = r.performing_fit.loglik_at_opt;
      report_json["psi_hat"] = parameters_json(cfg.family, r.psi_hat);
      for (std::size_t k = 0; k < r.latent_default.x.size(); ++k)
        latent.push_back(Vector{{r.latent_default.x[k](0), r.latent_performing.x[k](0)}});
      break;
    }
    case StudyMethod::PFGPR: {
      PFGridSpec grid = cfg.grid;
      if (f.particles) grid.particles = *f.particles;
      grid.workers = resolve_workers(f.workers);
      PFGPRResult r = pf_gpr_mle(cfg.family, series, u, grid, seed);
      report_json["estimate"]["a"] = r.estimate(0);
      report_json["estimate"]["k"] = r.estimate(1);
      report_json["fitted_loglik"] = r.fitted_max;
      report_json["particles"] = grid.particles;
      report_json["failed_grid_points"] = r.surface.failed_count();
      report_json["kernel"] = {{"sigma_f", r.surface.gpr.kernel.sigma_f},
                               {"lengthscales", {r.surface.gpr.kernel.lengthscales(0), r.surface.gpr.kernel.lengthscales(1)}},
                               {"sigma_noise", r.surface.gpr.kernel.sigma_noise}};
      report_json["psi_hat"] = parameters_json(cfg.family, r.psi_hat);
      {
        auto os = open_out(out / "surface.csv");
        write_surface(os, r.surface);
      }
      std::mt19937_64 rng(derive_seed(seed, r.surface.grid.size()));
      PFLikelihood pf = pf_importance(cfg.family, series, r.psi_hat, u, grid.particles, rng, grid.pf);
      auto os = open_out(out / "ess.csv");
      os << "period,ess\n";
      for (std::size_t k = 0; k < pf.ess_trace.size(); ++k) os << (k + 1) << ',' << pf.ess_trace[k] << '\n';
      LaplaceLikelihood ll = laplace_loglik(cfg.family, series, r.psi_hat, u, cfg.laplace);
      latent = ll.mode.latent;
      break;
    }
  }
  {
    auto os = open_out(out / "latent_estimates.csv");
    write_factor_file(os, latent);
  }
  auto os = open_out(out / "estimates.json");
  os << report_json.dump(2) << '\n';
  std::cout << report_json["estimate"].dump() << '\n';
  return 0;
}

int cmd_profile(const CommonFlags& f, const std::string& data, const std::string& axis, const std::string& range) {
  RunConfig cfg = require_config(f);
  double lo = 0, hi = 0;
  int count = 0;
  {
    std::istringstream is(range);
    char c1 = 0, c2 = 0;
    if (!(is >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 || hi < lo)
      throw ConfigError("--range must be lo:hi:count with count >= 1");
  }
  Vector values = count == 1 ? Vector::Constant(1, lo) : Vector(Vector::LinSpaced(count, lo, hi));
  MigrationSeries series = read_migrations(data, &cfg.scheme);
  ProfileOptions opt;
  opt.method = profile_method_from_string(f.method.empty() ? std::string("laplace") : f.method);
  opt.particles = f.particles.value_or(cfg.particles);
  opt.seed = f.seed.value_or(cfg.seed);
  opt.laplace = cfg.laplace;
  opt.pf.systematic_resampling = cfg.systematic;
  const LongRunAverages avg = long_run_averages(series);
  const Vector start = cfg.start ? *cfg.start : default_start(cfg.family);
  ModelParameters base = parameters_from_free(cfg.family, avg, start);
  ProfileTable table = likelihood_profile(cfg.family, series, base, ObservedFactors::zeros(series.period_count()),
                                          axis, values, opt);
  if (f.out.empty()) {
    write_profile(std::cout, table, opt.seed);
  } else {
    auto os = open_out(f.out);
    write_profile(os, table, opt.seed);
  }
  return 0;
}

int cmd_study(const CommonFlags& f) {
  RunConfig cfg = require_config(f);
  if (!cfg.truth) throw ConfigError("missing key 'truth'");
  if (!cfg.populations) throw ConfigError("missing key 'populations'");
  StudyConfig sc;
  sc.family = cfg.family;
  sc.truth = *cfg.truth;
  sc.populations = *cfg.populations;
  sc.periods = cfg.periods;
  sc.scenarios = cfg.scenarios;
  sc.method = study_method_from_string(f.method.empty() ? cfg.method : f.method);
  sc.renormalize = cfg.renormalize;
  sc.seed = f.seed.value_or(cfg.seed);
  sc.workers = resolve_workers(f.workers);
  sc.start = cfg.start;
  sc.mle.laplace = cfg.laplace;
  sc.grid = cfg.grid;
  if (f.particles) sc.grid.particles = *f.particles;
  StudyResult res = scenario_study(sc);
  const fs::path out = f.out.empty() ? fs::path("study") : fs::path(f.out);
  fs::create_directories(out);
  {
    auto os = open_out(out / "estimates.csv");
    write_study_estimates(os, res);
  }
  {
    auto os = open_out(out / "summary.txt");
    write_study_summary(os, res);
  }
  auto m = manifest("study", cfg, sc.seed);
  m["method"] = to_string(sc.method);
  m["workers"] = sc.workers;
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < res.failures.size(); ++i)
    if (!res.failures[i].empty()) failures.push_back("scenario " + std::to_string(i + 1) + ": " + res.failures[i]);
  m["failures"] = failures;
  {
    auto os = open_out(out / "manifest.json");
    os << m.dump(2) << '\n';
  }
  write_study_summary(std::cout, res);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  return res.successes > 0 ? 0 : kNumericalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibration of rating transition models with latent AR(1) factors"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string data, axis, range;

  auto add_common = [&](CLI::App* sub, bool with_method) {
    sub->add_option("--config", flags.config,
                    "JSON configuration with sections model, truth, populations, calibration, pf, gpr, study")
        ->required();
    sub->add_option("--seed", flags.seed, "master seed (default: study.seed, else 1)");
    sub->add_option("--workers", flags.workers, "worker threads (default: TRANSITION_CALIB_WORKERS, else 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output directory or file");
    if (with_method) {
      sub->add_option("--particles", flags.particles, "particles per filter run (default: pf.particles, else 1000)")
          ->check(CLI::PositiveNumber);
    }
  };

  auto* sim = app.add_subcommand("simulate", "simulate migration counts from the truth section");
  add_common(sim, false);

  auto* cal = app.add_subcommand("calibrate", "estimate parameters from a migration file");
  add_common(cal, true);
  cal->add_option("--data", data, "migration file (period,from,to,count)")->required();
  cal->add_option("--method", flags.method, "laplace | pf-gpr | stepwise (default: calibration.method)")
      ->check(CLI::IsMember({"laplace", "pf-gpr", "stepwise"}));

  auto* prof = app.add_subcommand("profile", "log-likelihood along one free parameter");
  add_common(prof, true);
  prof->add_option("--data", data, "migration file")->required();
  prof->add_option("--axis", axis, "free parameter name (a, k, a_d, a_p, k_d, k_p, rho)")->required();
  prof->add_option("--range", range, "lo:hi:count")->required();
  prof->add_option("--method", flags.method, "laplace | pf-is | pf-bootstrap (default: laplace)")
      ->check(CLI::IsMember({"laplace", "pf-is", "pf-bootstrap"}));

  auto* study = app.add_subcommand("study", "simulate and calibrate many scenarios");
  add_common(study, true);
  study->add_option("--method", flags.method, "laplace | pf-gpr | stepwise (default: calibration.method)")
      ->check(CLI::IsMember({"laplace", "pf-gpr", "stepwise"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (sim->parsed()) return cmd_simulate(flags);
    if (cal->parsed()) return cmd_calibrate(flags, data);
    if (prof->parsed()) return cmd_profile(flags, data, axis, range);
    if (study->parsed()) return cmd_study(flags);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kUsageError;
}
