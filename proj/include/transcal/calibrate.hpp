#pragma once

// Experiment drivers: likelihood profiles along one parameter, multi-scenario
// studies and the stepwise (default / migration-given-no-default) calibration
// of the two-factor probit model.

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "transcal/gpr.hpp"
#include "transcal/laplace.hpp"
#include "transcal/parallel.hpp"
#include "transcal/particle.hpp"
#include "transcal/simulate.hpp"

namespace transcal {

enum class ProfileMethod { Laplace, PFImportance, PFBootstrap };

inline std::string to_string(ProfileMethod m) {
  switch (m) {
    case ProfileMethod::Laplace: return "laplace";
    case ProfileMethod::PFImportance: return "pf-is";
    case ProfileMethod::PFBootstrap: return "pf-bootstrap";
  }
  return "unknown";
}

inline ProfileMethod profile_method_from_string(const std::string& s) {
  if (s == "laplace") return ProfileMethod::Laplace;
  if (s == "pf-is" || s == "pf_is") return ProfileMethod::PFImportance;
  if (s == "pf-bootstrap" || s == "pf_bootstrap" || s == "bootstrap") return ProfileMethod::PFBootstrap;
  throw ConfigError("unknown likelihood method '" + s + "'");
}

struct ProfileOptions {
  ProfileMethod method = ProfileMethod::Laplace;
  std::size_t particles = 1000;
  std::uint64_t seed = 1;  // reused at every point so PF curves share random numbers
  bool moment_matched = true;  // recompute levels from long-run averages at each point
  LaplaceOptions laplace;
  PFOptions pf;
};

struct ProfileTable {
  std::string axis;
  ProfileMethod method = ProfileMethod::Laplace;
  std::size_t particles = 0;
  Vector values;
  Vector loglik;  // NaN where the method failed
  std::vector<std::string> failures;
};

/// Index of a named free parameter ("a"/"A", "k"/"K" for one-factor families).
inline Eigen::Index free_parameter_index(const ModelFamily& family, const std::string& axis) {
  const ParameterBox box = default_parameter_box(family);
  std::string name = axis;
  if (name == "A") name = "a";
  if (name == "K") name = "k";
  for (std::size_t i = 0; i < box.names.size(); ++i)
    if (box.names[i] == name) return static_cast<Eigen::Index>(i);
  throw ConfigError("'" + axis + "' is not a free parameter of family " + to_string(family.kind));
}

/// Parameters with one free coordinate replaced.
inline ModelParameters with_free_parameter(const ModelFamily& family, const ModelParameters& base,
                                           const LongRunAverages* avg, Eigen::Index index, double value) {
  Vector z = free_from_parameters(family, base);
  z(index) = value;
  if (avg) return parameters_from_free(family, *avg, z);
  switch (family.kind) {
    case FamilyKind::DefaultOnlyProbit:
      return default_only_parameters(base.levels.col(family.ratings - 1), z(1), z(0));
    case FamilyKind::PerformingProbit: return performing_parameters(base.levels, z(1), z(0));
    case FamilyKind::TwoFactorProbit: return two_factor_parameters(base.levels, z(2), z(3), z(0), z(1), z(4));
    case FamilyKind::MultiFactorLogistic: break;
  }
  throw DomainError("profiles cover the probit families only");
}

inline double evaluate_loglik(const ModelFamily& family, const MigrationSeries& series, const ModelParameters& psi,
                              const ObservedFactors& u, ProfileMethod method, std::size_t particles,
                              std::uint64_t seed, const LaplaceOptions& laplace = {}, const PFOptions& pf = {}) {
  switch (method) {
    case ProfileMethod::Laplace: return laplace_loglik(family, series, psi, u, laplace).loglik;
    case ProfileMethod::PFImportance: {
      std::mt19937_64 rng(seed);
      return pf_importance(family, series, psi, u, particles, rng, pf).loglik;
    }
    case ProfileMethod::PFBootstrap: {
      std::mt19937_64 rng(seed);
      return bootstrap_pf(family, series, psi, u, particles, rng, pf).loglik;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline ProfileTable likelihood_profile(const ModelFamily& family, const MigrationSeries& series,
                                       const ModelParameters& psi_base, const ObservedFactors& u,
                                       const std::string& axis, const Vector& values, const ProfileOptions& opt = {}) {
  if (values.size() == 0) throw ConfigError("profile range is empty");
  const Eigen::Index index = free_parameter_index(family, axis);
  std::optional<LongRunAverages> avg;
  if (opt.moment_matched) avg = long_run_averages(series);
  ProfileTable table;
  table.axis = axis;
  table.method = opt.method;
  table.particles = opt.method == ProfileMethod::Laplace ? 0 : opt.particles;
  table.values = values;
  table.loglik = Vector::Constant(values.size(), std::numeric_limits<double>::quiet_NaN());
  table.failures.assign(static_cast<std::size_t>(values.size()), std::string());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    try {
      ModelParameters psi = with_free_parameter(family, psi_base, avg ? &*avg : nullptr, index, values(i));
      table.loglik(i) = evaluate_loglik(family, series, psi, u, opt.method, opt.particles, opt.seed, opt.laplace, opt.pf);
    } catch (const Error& e) {
      table.failures[static_cast<std::size_t>(i)] = e.what();
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Stepwise calibration.

struct StepwiseResult {
  std::vector<std::string> names{"a_d", "a_p", "k_d", "k_p", "rho"};
  Vector estimate;  // (a_d, a_p, k_d, k_p, rho)
  MLEResult default_fit;
  MLEResult performing_fit;
  LatentPath latent_default;
  LatentPath latent_performing;
  ModelParameters psi_hat;  // assembled two-factor parameters
};

/// Sample correlation of the AR residuals x_k - a x_{k-1}, k >= 2.
inline double residual_correlation(const std::vector<Vector>& xd, double ad, const std::vector<Vector>& xp, double ap) {
  const std::size_t n = std::min(xd.size(), xp.size());
  if (n < 3) throw DomainError("at least three periods are needed to estimate rho");
  Vector ed(static_cast<Eigen::Index>(n - 1)), ep(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k) {
    ed(static_cast<Eigen::Index>(k - 1)) = xd[k](0) - ad * xd[k - 1](0);
    ep(static_cast<Eigen::Index>(k - 1)) = xp[k](0) - ap * xp[k - 1](0);
  }
  ed.array() -= ed.mean();
  ep.array() -= ep.mean();
  const double denom = std::sqrt(ed.squaredNorm() * ep.squaredNorm());
  if (!(denom > 0.0)) throw DomainError("latent residuals have zero variance");
  return ed.dot(ep) / denom;
}

inline StepwiseResult stepwise_calibrate(const MigrationSeries& series, const ObservedFactors& u,
                                         const MLEOptions& opt = {}, double a0 = 0.5, double k0 = 0.5) {
  const int r = series.ratings;
  if (r < 3) throw DomainError("stepwise calibration needs at least two performing ratings");
  const LongRunAverages avg = long_run_averages(series);
  StepwiseResult res;

  const ModelFamily fd = ModelFamily::default_only(r);
  const MigrationSeries collapsed = collapse_to_default_only(series);
  const Vector start(Vector{{a0, k0}});
  res.default_fit = mle_laplace(fd, collapsed, u, parameters_from_free(fd, avg, start), opt);

  const ModelFamily fp = ModelFamily::performing(r);
  res.performing_fit = mle_laplace(fp, series, u, parameters_from_free(fp, avg, start), opt);

  const double ad = res.default_fit.estimate(0);
  const double kd = res.default_fit.estimate(1);
  const double ap = res.performing_fit.estimate(0);
  const double kp = res.performing_fit.estimate(1);
  res.latent_default = res.default_fit.latent_estimates;
  res.latent_performing = res.performing_fit.latent_estimates;
  double rho = residual_correlation(res.latent_default.x, ad, res.latent_performing.x, ap);
  rho = std::clamp(rho, -0.95, 0.95);
  res.estimate = Vector{{ad, ap, kd, kp, rho}};
  res.psi_hat = parameters_from_free(ModelFamily::two_factor(r), avg, res.estimate);
  return res;
}

// ---------------------------------------------------------------------------
// Scenario studies.

enum class StudyMethod { Laplace, Stepwise, PFGPR };

inline std::string to_string(StudyMethod m) {
  switch (m) {
    case StudyMethod::Laplace: return "laplace";
    case StudyMethod::Stepwise: return "stepwise";
    case StudyMethod::PFGPR: return "pf-gpr";
  }
  return "unknown";
}

inline StudyMethod study_method_from_string(const std::string& s) {
  if (s == "laplace") return StudyMethod::Laplace;
  if (s == "stepwise") return StudyMethod::Stepwise;
  if (s == "pf-gpr" || s == "pf_gpr") return StudyMethod::PFGPR;
  throw ConfigError("unknown calibration method '" + s + "'");
}

struct StudyConfig {
  ModelFamily family = ModelFamily::default_only(4);
  ModelParameters truth;
  Eigen::VectorXi populations;
  std::size_t periods = 150;
  std::size_t scenarios = 1000;
  StudyMethod method = StudyMethod::Laplace;
  bool renormalize = false;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: TRANSITION_CALIB_WORKERS or 1
  std::optional<Vector> start;  // free-parameter start; a neutral default otherwise
  MLEOptions mle;
  PFGridSpec grid;
};

struct StudyResult {
  std::vector<std::string> names;
  Matrix estimates;  // scenarios x parameters, NaN rows for failures
  Vector loglik;
  std::vector<std::string> failures;
  Vector mean;
  Vector std;
  std::size_t successes = 0;
  std::vector<std::string> warnings;
};

/// Parameter names reported by a study.
inline std::vector<std::string> study_parameter_names(const StudyConfig& cfg) {
  if (cfg.method == StudyMethod::Stepwise) return {"a_d", "a_p", "k_d", "k_p", "rho"};
  return default_parameter_box(cfg.family).names;
}

inline Vector default_start(const ModelFamily& family) {
  if (family.kind == FamilyKind::TwoFactorProbit) return Vector{{0.5, 0.5, 0.5, 0.5, 0.0}};
  return Vector{{0.5, 0.5}};
}

/// Simulated data of scenario `index`.
inline SimulatedScenario study_scenario(const StudyConfig& cfg, std::size_t index) {
  std::mt19937_64 rng(derive_seed(cfg.seed, index));
  ModelFamily sim_family = cfg.family;
  return simulate_migrations(sim_family, cfg.truth, cfg.populations, cfg.periods, rng,
                             ObservedFactors::zeros(cfg.periods), cfg.renormalize);
}

/// Calibrates one scenario; returns the estimate and the log-likelihood at it.
inline std::pair<Vector, double> calibrate_scenario(const StudyConfig& cfg, std::size_t index,
                                                    const MigrationSeries& series) {
  const ObservedFactors u = ObservedFactors::zeros(series.period_count());
  const Vector start = cfg.start ? *cfg.start : default_start(cfg.family);
  switch (cfg.method) {
    case StudyMethod::Laplace: {
      const LongRunAverages avg = long_run_averages(series);
      MLEResult r = mle_laplace(cfg.family, series, u, parameters_from_free(cfg.family, avg, start), cfg.mle);
      return {r.estimate, r.loglik_at_opt};
    }
    case StudyMethod::Stepwise: {
      if (cfg.family.kind != FamilyKind::TwoFactorProbit)
        throw ConfigError("stepwise calibration applies to the two-factor family");
      StepwiseResult r = stepwise_calibrate(series, u, cfg.mle);
      return {r.estimate, r.default_fit.loglik_at_opt + r.performing_fit.loglik_at_opt};
    }
    case StudyMethod::PFGPR: {
      PFGridSpec grid = cfg.grid;
      grid.workers = 1;
      PFGPRResult r = pf_gpr_mle(cfg.family, series, u, grid, derive_seed(derive_seed(cfg.seed, index), 1));
      return {r.estimate, r.fitted_max};
    }
  }
  throw ConfigError("unknown study method");
}

inline void summarize(StudyResult& res) {
  const Eigen::Index p = res.estimates.cols();
  res.mean = Vector::Zero(p);
  res.std = Vector::Zero(p);
  res.successes = 0;
  for (Eigen::Index s = 0; s < res.estimates.rows(); ++s) {
    if (res.estimates.row(s).array().isNaN().any()) continue;
    res.mean += res.estimates.row(s).transpose();
    ++res.successes;
  }
  if (res.successes == 0) {
    res.mean.setConstant(std::numeric_limits<double>::quiet_NaN());
    res.std.setConstant(std::numeric_limits<double>::quiet_NaN());
    res.warnings.push_back("no scenario calibrated successfully");
    return;
  }
  res.mean /= static_cast<double>(res.successes);
  if (res.successes == 1) {
    res.warnings.push_back("a single successful scenario: standard deviations reported as 0");
    return;
  }
  for (Eigen::Index s = 0; s < res.estimates.rows(); ++s) {
    if (res.estimates.row(s).array().isNaN().any()) continue;
    res.std += (res.estimates.row(s).transpose() - res.mean).array().square().matrix();
  }
  res.std = (res.std / static_cast<double>(res.successes - 1)).cwiseSqrt();
}

/// Simulates and calibrates cfg.scenarios data sets. Scenario i uses the seed
/// derive_seed(cfg.seed, i), so results do not depend on the worker count.
inline StudyResult scenario_study(const StudyConfig& cfg) {
  if (cfg.scenarios == 0) throw ConfigError("study needs at least one scenario");
  StudyResult res;
  res.names = study_parameter_names(cfg);
  const auto p = static_cast<Eigen::Index>(res.names.size());
  const auto ns = static_cast<Eigen::Index>(cfg.scenarios);
  res.estimates = Matrix::Constant(ns, p, std::numeric_limits<double>::quiet_NaN());
  res.loglik = Vector::Constant(ns, std::numeric_limits<double>::quiet_NaN());
  res.failures.assign(cfg.scenarios, std::string());
  parallel_for(cfg.scenarios, resolve_workers(cfg.workers), [&](std::size_t i) {
    try {
      SimulatedScenario sc = study_scenario(cfg, i);
      auto [est, ll] = calibrate_scenario(cfg, i, sc.series);
      res.estimates.row(static_cast<Eigen::Index>(i)) = est.transpose();
      res.loglik(static_cast<Eigen::Index>(i)) = ll;
    } catch (const Error& e) {
      res.failures[i] = e.what();
    }
  });
  summarize(res);
  return res;
}

}  // namespace transcal
