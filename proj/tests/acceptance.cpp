// Acceptance checks. Usage: acceptance [criterion ...]; no argument runs all.
// Prints one "PASS criterion N: ..." or "FAIL criterion N: ..." line each and
// exits non-zero if any criterion failed.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "transcal/transcal.hpp"

using namespace transcal;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

std::string config_path(const std::string& name) { return std::string(TRANSCAL_SOURCE_DIR) + "/configs/" + name; }

double sample_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

StudyConfig study_from(const RunConfig& rc) {
  StudyConfig sc;
  sc.family = rc.family;
  sc.truth = *rc.truth;
  sc.populations = *rc.populations;
  sc.periods = rc.periods;
  sc.scenarios = rc.scenarios;
  sc.renormalize = rc.renormalize;
  sc.seed = rc.seed;
  sc.workers = resolve_workers(0);
  sc.start = rc.start;
  sc.mle.laplace = rc.laplace;
  sc.grid = rc.grid;
  return sc;
}

std::string failure_note(const StudyResult& r) {
  const std::size_t failed = static_cast<std::size_t>(r.estimates.rows()) - r.successes;
  return failed ? " (" + std::to_string(failed) + " scenarios failed: " + [&] {
    for (const auto& f : r.failures)
      if (!f.empty()) return f;
    return std::string();
  }() + ")" : "";
}

// ---------------------------------------------------------------------------

Verdict criterion_1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240301);
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    fixture::Instance in = fixture::random_instance(rng);
    const double ref = oracle::dense_ssm_loglik(in.ssm.y, in.ssm.offset, in.z, in.h, in.a, in.q, in.ssm.a0, in.ssm.P0);
    worst = std::max(worst, std::abs(kalman_filter(in.ssm).loglik - ref));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-10 && t < 5.0, "max |filter - dense oracle| = " + fmt(worst, 3) + " (limit 1e-10), " + fmt(t, 3) + " s"};
}

Verdict criterion_2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240302);
  double worst_g = 0, worst_h = 0;
  for (int which = 0; which < 100; ++which) {
    fixture::Case c = fixture::random_case(which, rng);
    MultinomialObservation obs(c.family, c.series, c.psi.levels);
    Vector g;
    Matrix h;
    obs.period_derivatives(0, c.theta, g, h);
    const double step = 1e-5;
    for (Eigen::Index j = 0; j < c.theta.size(); ++j) {
      Vector e = Vector::Zero(c.theta.size());
      e(j) = step;
      const double fd =
          (fixture::row_sum_loglik(c, c.theta + e) - fixture::row_sum_loglik(c, c.theta - e)) / (2 * step);
      worst_g = std::max(worst_g, std::abs(g(j) - fd) / std::max(1.0, std::abs(fd)));
      Vector gp, gm;
      Matrix hp, hm;
      obs.period_derivatives(0, c.theta + e, gp, hp);
      obs.period_derivatives(0, c.theta - e, gm, hm);
      Vector col = (gp - gm) / (2 * step);
      worst_h = std::max(worst_h, (h.col(j) - col).lpNorm<Eigen::Infinity>() / std::max(1.0, col.lpNorm<Eigen::Infinity>()));
    }
  }
  const double t = seconds_since(t0);
  return {worst_g <= 1e-6 && worst_h <= 1e-5 && t < 10.0,
          "gradient rel err " + fmt(worst_g, 3) + " (limit 1e-6), Hessian rel err " + fmt(worst_h, 3) +
              " (limit 1e-5), " + fmt(t, 3) + " s"};
}

Verdict criterion_3() {
  const auto t0 = Clock::now();
  const double k = 0.3, a = 0.7;
  const ModelFamily fam = ModelFamily::default_only(2);
  const double d = derive_d_from_average(0.04, k);
  ModelParameters psi = default_only_parameters(Vector::Constant(1, d), k, a);
  double worst = 0;
  for (int rep = 0; rep < 5; ++rep) {
    std::mt19937_64 rng(20240303 + rep);
    auto sc = simulate_migrations(fam, psi, Eigen::VectorXi::Constant(1, 10000), 2, rng, ObservedFactors::zeros(2));
    const double lap = laplace_loglik(fam, sc.series, psi, ObservedFactors::zeros(2)).loglik;
    const double ref = fixture::quadrature_loglik(sc.series, d, k, a);
    worst = std::max(worst, std::abs(lap - ref) / std::abs(ref));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-3 && t < 10.0,
          "max relative gap to 64x64 Gauss-Hermite = " + fmt(worst, 3) + " (limit 1e-3), " + fmt(t, 3) + " s"};
}

struct ProfileRun {
  Vector values;
  Vector laplace;
  Vector pf_mean;
  Vector pf_sd;
};

// Laplace profile plus `reruns` PF-IS profiles at N particles.
ProfileRun laplace_and_pf_profile(const ModelFamily& fam, const MigrationSeries& series, const ModelParameters& base,
                                  const std::string& axis, const Vector& values, std::size_t particles, int reruns,
                                  std::uint64_t seed) {
  const ObservedFactors u = ObservedFactors::zeros(series.period_count());
  ProfileRun out;
  out.values = values;
  out.laplace = likelihood_profile(fam, series, base, u, axis, values).loglik;
  std::vector<std::vector<double>> pf(static_cast<std::size_t>(values.size()));
  for (int r = 0; r < reruns; ++r) {
    ProfileOptions opt;
    opt.method = ProfileMethod::PFImportance;
    opt.particles = particles;
    opt.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    Vector ll = likelihood_profile(fam, series, base, u, axis, values, opt).loglik;
    for (Eigen::Index i = 0; i < values.size(); ++i) pf[static_cast<std::size_t>(i)].push_back(ll(i));
  }
  out.pf_mean.resize(values.size());
  out.pf_sd.resize(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out.pf_mean(i) = sample_mean(pf[static_cast<std::size_t>(i)]);
    out.pf_sd(i) = sample_sd(pf[static_cast<std::size_t>(i)]);
  }
  return out;
}

void write_profile_run(const std::string& path, const ProfileRun& p) {
  std::ofstream os(path);
  os << "value,laplace,pf_is_mean,pf_is_sd\n" << std::setprecision(12);
  for (Eigen::Index i = 0; i < p.values.size(); ++i)
    os << p.values(i) << ',' << p.laplace(i) << ',' << p.pf_mean(i) << ',' << p.pf_sd(i) << '\n';
}

Verdict criterion_4() {
  const auto t0 = Clock::now();
  RunConfig rc = load_config(config_path("high_default.json"));
  StudyConfig sc = study_from(rc);
  const MigrationSeries series = study_scenario(sc, 0).series;
  const Vector values = Vector::LinSpaced(15, 0.1, 0.9);
  const LongRunAverages avg = long_run_averages(series);
  std::string detail;
  bool pass = true;
  for (const auto& [axis, fixed] : std::vector<std::pair<std::string, Vector>>{{"k", Vector{{0.7, 0.3}}},
                                                                             {"a", Vector{{0.7, 0.3}}}}) {
    ModelParameters base = parameters_from_free(rc.family, avg, fixed);
    ProfileRun p = laplace_and_pf_profile(rc.family, series, base, axis, values, 2000, 10, rc.seed);
    write_profile_run("criterion4_profile_" + axis + ".csv", p);
    double worst = 0;
    int breaches = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const double ratio = std::abs(p.laplace(i) - p.pf_mean(i)) / p.pf_sd(i);
      if (!(ratio <= 3.0)) ++breaches;
      worst = std::max(worst, std::isnan(ratio) ? kInf : ratio);
    }
    pass = pass && breaches == 0;
    detail += axis + "-profile max |gap|/se = " + fmt(worst, 3) + " (" + std::to_string(breaches) + " of 15 above 3); ";
  }
  const double t = seconds_since(t0);
  pass = pass && t < 600.0;
  return {pass, detail + fmt(t, 4) + " s"};
}

Verdict criterion_5() {
  const auto t0 = Clock::now();
  RunConfig rc = load_config(config_path("low_default.json"));
  StudyConfig sc = study_from(rc);
  const MigrationSeries series = study_scenario(sc, 0).series;
  const ObservedFactors u = ObservedFactors::zeros(series.period_count());
  const LongRunAverages avg = long_run_averages(series);
  // low-K end of the K-profile at A = 0.7
  const Vector values = Vector::LinSpaced(15, 0.1, 0.9).head(5);
  ModelParameters base = parameters_from_free(rc.family, avg, Vector{{0.7, 0.6}});
  ProfileRun ref = laplace_and_pf_profile(rc.family, series, base, "k", values, 2000, 10, rc.seed);
  std::vector<double> gaps;
  std::ofstream os("criterion5_bootstrap_gap.csv");
  os << "particles,value,pf_is,bootstrap\n" << std::setprecision(12);
  for (std::size_t n : {std::size_t{5000}, std::size_t{50000}, std::size_t{100000}}) {
    ProfileOptions opt;
    opt.method = ProfileMethod::PFBootstrap;
    opt.particles = n;
    opt.seed = derive_seed(rc.seed, 1000 + n);
    ProfileTable t = likelihood_profile(rc.family, series, base, u, "k", values, opt);
    double gap = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      gap += std::abs(t.loglik(i) - ref.pf_mean(i)) / static_cast<double>(values.size());
      os << n << ',' << values(i) << ',' << ref.pf_mean(i) << ',' << t.loglik(i) << '\n';
    }
    gaps.push_back(gap);
  }
  const double t = seconds_since(t0);
  const bool decreasing = gaps[0] > gaps[1] && gaps[1] > gaps[2];
  return {decreasing && t < 1200.0, "mean |bootstrap - PF-IS| over K in [0.1, 0.33]: N=5e3 " + fmt(gaps[0]) +
                                        ", N=5e4 " + fmt(gaps[1]) + ", N=1e5 " + fmt(gaps[2]) + ", " + fmt(t, 4) + " s"};
}

// The two-factor Laplace study shared by criteria 6-8: 200 scenarios with
// renormalized innovations. Criterion 6 always recomputes it and stores the
// estimates; 7 and 8 reuse the stored run when its header matches.
StudyConfig two_factor_study() {
  RunConfig rc = load_config(config_path("two_factor.json"));
  StudyConfig sc = study_from(rc);
  sc.scenarios = 200;
  sc.renormalize = true;
  sc.method = StudyMethod::Laplace;
  return sc;
}

std::string cache_header(const StudyConfig& sc) {
  return "# two-factor laplace seed=" + std::to_string(sc.seed) + " scenarios=" + std::to_string(sc.scenarios) +
         " renormalize=" + std::to_string(sc.renormalize) + " version=" + TRANSCAL_VERSION;
}

const char* kCache = "acceptance_two_factor_laplace.csv";

void store_study(const StudyConfig& sc, const StudyResult& r) {
  std::ofstream os(kCache);
  os << cache_header(sc) << '\n' << std::setprecision(17);
  for (Eigen::Index s = 0; s < r.estimates.rows(); ++s) {
    for (Eigen::Index p = 0; p < r.estimates.cols(); ++p) os << (p ? "," : "") << r.estimates(s, p);
    os << '\n';
  }
}

std::optional<StudyResult> load_study(const StudyConfig& sc) {
  std::ifstream is(kCache);
  std::string line;
  if (!is || !std::getline(is, line) || line != cache_header(sc)) return std::nullopt;
  StudyResult r;
  r.names = {"a_d", "a_p", "k_d", "k_p", "rho"};
  r.estimates = Matrix::Constant(static_cast<Eigen::Index>(sc.scenarios), 5, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index s = 0; s < r.estimates.rows(); ++s) {
    if (!std::getline(is, line)) return std::nullopt;
    std::istringstream ls(line);
    std::string cell;
    for (Eigen::Index p = 0; p < 5; ++p) {
      if (!std::getline(ls, cell, ',')) return std::nullopt;
      r.estimates(s, p) = std::strtod(cell.c_str(), nullptr);
    }
  }
  r.failures.assign(sc.scenarios, std::string());
  for (Eigen::Index s = 0; s < r.estimates.rows(); ++s)
    if (r.estimates.row(s).array().isNaN().any()) r.failures[static_cast<std::size_t>(s)] = "failed in stored run";
  summarize(r);
  return r;
}

StudyResult two_factor_joint(bool recompute) {
  StudyConfig sc = two_factor_study();
  if (!recompute)
    if (auto r = load_study(sc)) return *r;
  StudyResult r = scenario_study(sc);
  store_study(sc, r);
  return r;
}

Verdict criterion_6() {
  const auto t0 = Clock::now();
  StudyResult r = two_factor_joint(true);
  const double target[5] = {0.6768, 0.7732, 0.2962, 0.1976, 0.3998};
  const double paper_std[5] = {0.0550, 0.0493, 0.0264, 0.0217, 0.0705};
  bool pass = r.successes > 0;
  std::string detail;
  for (int p = 0; p < 5; ++p) {
    const double tol = std::max(3.0 * paper_std[p] / std::sqrt(200.0), 0.02);
    const bool ok = std::abs(r.mean(p) - target[p]) <= tol;
    pass = pass && ok;
    detail += r.names[static_cast<std::size_t>(p)] + " " + fmt(r.mean(p)) + " vs " + fmt(target[p]) + (ok ? "" : " (out)") +
              (p < 4 ? ", " : "");
  }
  const double t = seconds_since(t0);
  pass = pass && t < 1800.0;
  return {pass, "means " + detail + " [tol " + fmt(0.02) + "]" + failure_note(r) + ", " + fmt(t, 4) + " s"};
}

Verdict criterion_7() {
  StudyResult r = two_factor_joint(false);
  const bool pass = r.successes > 1 && r.std(2) <= 0.015 && r.std(3) <= 0.015;
  return {pass, "renormalized run: std k_d " + fmt(r.std(2)) + ", std k_p " + fmt(r.std(3)) + " (limit 0.015)" +
                    failure_note(r)};
}

Verdict criterion_8() {
  const auto t0 = Clock::now();
  StudyResult joint = two_factor_joint(false);
  StudyConfig sc = two_factor_study();
  sc.method = StudyMethod::Stepwise;
  StudyResult step = scenario_study(sc);
  Vector mad = Vector::Zero(5);
  int both = 0;
  for (Eigen::Index s = 0; s < joint.estimates.rows(); ++s) {
    if (joint.estimates.row(s).array().isNaN().any() || step.estimates.row(s).array().isNaN().any()) continue;
    mad += (joint.estimates.row(s) - step.estimates.row(s)).cwiseAbs().transpose();
    ++both;
  }
  if (both > 0) mad /= both;
  bool pass = both > 0;
  std::string detail;
  for (int p = 0; p < 5; ++p) {
    pass = pass && mad(p) <= 0.03;
    detail += joint.names[static_cast<std::size_t>(p)] + " " + fmt(mad(p), 3) + (p < 4 ? ", " : "");
  }
  const double t = seconds_since(t0);
  pass = pass && t < 2700.0;
  return {pass, "mean |stepwise - joint| over " + std::to_string(both) + " scenarios: " + detail + " (limit 0.03), " +
                    fmt(t, 4) + " s"};
}

StudyResult pf_gpr_study(const std::string& config) {
  RunConfig rc = load_config(config_path(config));
  StudyConfig sc = study_from(rc);
  sc.scenarios = 100;
  sc.method = StudyMethod::PFGPR;
  sc.grid.grid = CartesianGrid::uniform(Vector::Constant(2, 0.1), Vector::Constant(2, 0.9), 20);
  sc.grid.particles = 1000;
  StudyResult r = scenario_study(sc);
  std::ofstream os("acceptance_" + config.substr(0, config.find('.')) + "_pf_gpr.csv");
  write_study_estimates(os, r);
  return r;
}

Verdict criterion_9() {
  const auto t0 = Clock::now();
  StudyResult r = pf_gpr_study("high_default.json");
  const bool ok_a = std::abs(r.mean(0) - 0.6720) <= 0.04, ok_k = std::abs(r.mean(1) - 0.2903) <= 0.04;
  const double t = seconds_since(t0);
  return {r.successes > 0 && ok_a && ok_k && t < 7200.0,
          "means a " + fmt(r.mean(0)) + " vs 0.672, k " + fmt(r.mean(1)) + " vs 0.2903 (tol 0.04); std a " +
              fmt(r.std(0)) + ", k " + fmt(r.std(1)) + failure_note(r) + ", " + fmt(t, 4) + " s"};
}

Verdict criterion_10() {
  const auto t0 = Clock::now();
  StudyResult r = pf_gpr_study("low_default.json");
  const bool ok_a = std::abs(r.mean(0) - 0.7211) <= 0.06, ok_k = std::abs(r.mean(1) - 0.5518) <= 0.06;
  const bool below = r.mean(1) < 0.6;
  const double t = seconds_since(t0);
  return {r.successes > 0 && ok_a && ok_k && below && t < 7200.0,
          "means a " + fmt(r.mean(0)) + " vs 0.7211, k " + fmt(r.mean(1)) + " vs 0.5518 (tol 0.06), k below 0.6: " +
              (below ? "yes" : "no") + "; std a " + fmt(r.std(0)) + ", k " + fmt(r.std(1)) + failure_note(r) + ", " +
              fmt(t, 4) + " s"};
}

Verdict criterion_11() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240311);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Kronecker vs dense on random grids up to three dimensions
  double kron_gap = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 1 + rep % 3;
    std::vector<Vector> axes;
    for (int m = 0; m < d; ++m) {
      const int n = 2 + static_cast<int>(u(rng) * (d == 3 ? 3 : 6));
      Vector a(n);
      double v = u(rng);
      for (int i = 0; i < n; ++i) a(i) = (v += 0.05 + 0.3 * u(rng));
      axes.push_back(a);
    }
    CartesianGrid grid(axes);
    Vector y(static_cast<Eigen::Index>(grid.size()));
    for (auto& v : y) v = g(rng);
    KernelSpec k{0.5 + u(rng), Vector::Constant(d, 0.2 + 0.8 * u(rng)), 0.05 + 0.3 * u(rng)};
    TrainedGPR kron = grid_fit(grid, y, k);
    TrainedGPR dense = gpr_fit(grid.points(), y, k, false);
    Matrix q = grid.points().array() + 0.021;
    kron_gap = std::max({kron_gap, std::abs(kron.log_marginal - dense.log_marginal),
                         (gpr_predict(kron, q).mean - gpr_predict(dense, q).mean).lpNorm<Eigen::Infinity>()});
  }

  // interpolation as the noise vanishes
  double interp_gap = 0;
  {
    Matrix x(8, 2);
    for (auto& v : x.reshaped()) v = u(rng);
    Vector y(8);
    for (auto& v : y) v = g(rng);
    TrainedGPR m = gpr_fit(x, y, KernelSpec{1.0, Vector::Constant(2, 0.2), 1e-6}, false);
    interp_gap = (gpr_predict(m, x).mean - y).lpNorm<Eigen::Infinity>();
  }

  // marginal likelihood against a dense Gaussian density
  double ml_gap = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 4 + rep, d = 1 + rep % 2;
    Matrix x(n, d);
    for (auto& v : x.reshaped()) v = u(rng);
    Vector y(n);
    for (auto& v : y) v = g(rng);
    KernelSpec k{0.5 + u(rng), Vector::Constant(d, 0.1 + u(rng)), 0.05 + 0.5 * u(rng)};
    Matrix c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        c(i, j) = k.sigma_f * k.sigma_f * std::exp(-0.5 * ((x.row(i) - x.row(j)).array() / k.lengthscales.transpose().array()).square().sum()) +
                  (i == j ? k.sigma_noise * k.sigma_noise : 0.0);
    const double ref = oracle::mvn_logpdf(Vector(y.array() - y.mean()), oracle::Vec::Zero(n), c);
    ml_gap = std::max(ml_gap, std::abs(gpr_log_marginal(x, y, k) - ref));
  }

  // smooth k cross-section at a = 0.73 from a PF likelihood surface
  RunConfig rc = load_config(config_path("high_default.json"));
  StudyConfig sc = study_from(rc);
  const MigrationSeries series = study_scenario(sc, 0).series;
  PFGridSpec spec;
  spec.grid = CartesianGrid::uniform(Vector::Constant(2, 0.1), Vector::Constant(2, 0.9), 20);
  spec.particles = 1000;
  spec.workers = resolve_workers(0);
  PFGPRResult fit = pf_gpr_mle(rc.family, series, ObservedFactors::zeros(series.period_count()), spec, rc.seed);
  const Vector ks = Vector::LinSpaced(161, 0.1, 0.9);
  GPRPrediction cs = gpr_cross_section(fit.surface.gpr, Vector{{0.73, 0.0}}, 1, ks);
  {
    std::ofstream os("criterion11_cross_section.csv");
    os << "k,fitted_loglik,sd\n" << std::setprecision(12);
    for (Eigen::Index i = 0; i < ks.size(); ++i) os << ks(i) << ',' << cs.mean(i) << ',' << std::sqrt(cs.variance(i)) << '\n';
    std::ofstream ts("criterion11_training.csv");
    write_surface(ts, fit.surface);
  }
  int sign_changes = 0;
  for (Eigen::Index i = 2; i < ks.size(); ++i)
    if ((cs.mean(i) - cs.mean(i - 1)) * (cs.mean(i - 1) - cs.mean(i - 2)) < 0) ++sign_changes;
  const bool smooth = cs.mean.allFinite() && sign_changes <= 1;

  const double t = seconds_since(t0);
  const bool pass = kron_gap <= 1e-8 && interp_gap <= 1e-6 && ml_gap <= 1e-8 && smooth && t < 30.0;
  return {pass, "kronecker/dense " + fmt(kron_gap, 3) + " (1e-8), interpolation " + fmt(interp_gap, 3) +
                    " (1e-6), marginal likelihood " + fmt(ml_gap, 3) + " (1e-8), cross-section slope changes " +
                    std::to_string(sign_changes) + " (criterion11_cross_section.csv), " + fmt(t, 3) + " s"};
}

Verdict criterion_12() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240312);
  std::uniform_real_distribution<double> mu_d(-3.0, 1.0), sigma_d(0.05, 2.0);
  double worst = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const double mu = mu_d(rng), sigma = sigma_d(rng);
    std::normal_distribution<double> g(mu, sigma);
    const int n = 1000000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double v = normal::cdf(g(rng));
      s += v;
      s2 += v * v;
    }
    const double m = s / n;
    const double se = std::sqrt((s2 / n - m * m) / n);
    worst = std::max(worst, std::abs(m - oracle::Phi(mu / std::sqrt(1.0 + sigma * sigma))) / se);
  }
  const double t = seconds_since(t0);
  return {worst <= 3.0 && t < 10.0, "max |MC - closed form| / se = " + fmt(worst, 3) + " (limit 3), " + fmt(t, 3) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Verdict()>> criteria{
      {1, criterion_1}, {2, criterion_2}, {3, criterion_3},   {4, criterion_4},   {5, criterion_5},   {6, criterion_6},
      {7, criterion_7}, {8, criterion_8}, {9, criterion_9}, {10, criterion_10}, {11, criterion_11}, {12, criterion_12}};
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "all") continue;
    const int c = std::atoi(a.c_str());
    if (!criteria.count(c)) {
      std::cerr << "unknown criterion '" << a << "'\n";
      return 2;
    }
    wanted.push_back(c);
  }
  if (wanted.empty())
    for (const auto& [c, fn] : criteria) wanted.push_back(c);
  int failed = 0;
  for (int c : wanted) {
    Verdict v;
    try {
      v = criteria.at(c)();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c << ": " << v.detail << std::endl;
    failed += !v.pass;
  }
  return failed ? 1 : 0;
}
