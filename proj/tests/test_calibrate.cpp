#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "transcal/transcal.hpp"

using namespace transcal;

namespace {

MigrationSeries high_default_series(std::size_t n, std::uint64_t seed, ModelParameters* psi_out = nullptr) {
  ModelFamily fam = ModelFamily::default_only(4);
  ModelParameters psi = parameters_from_free(fam, averages_from_targets(Vector{{0.01, 0.04, 0.1}}, Matrix()),
                                             Vector{{0.7, 0.3}});
  if (psi_out) *psi_out = psi;
  std::mt19937_64 rng(seed);
  return simulate_migrations(fam, psi, Eigen::VectorXi{{100000, 10000, 5000}}, n, rng, ObservedFactors::zeros(n)).series;
}

Matrix nd_matrix() { return Matrix{{0.85, 0.1, 0.05}, {0.2, 0.6, 0.2}, {0.1, 0.2, 0.7}}; }

}  // namespace

TEST(Profile, SinglePointEqualsDirectEvaluation) {
  ModelParameters psi;
  MigrationSeries s = high_default_series(40, 1, &psi);
  ModelFamily fam = ModelFamily::default_only(4);
  ProfileTable t = likelihood_profile(fam, s, psi, ObservedFactors::zeros(40), "K", Vector::Constant(1, 0.45));
  ModelParameters at = parameters_from_free(fam, long_run_averages(s), Vector{{0.7, 0.45}});
  EXPECT_EQ(t.loglik(0), laplace_loglik(fam, s, at, ObservedFactors::zeros(40)).loglik);
  EXPECT_EQ(t.particles, 0u);
}

TEST(Profile, FixedLevelsWhenNotMomentMatched) {
  ModelParameters psi;
  MigrationSeries s = high_default_series(30, 2, &psi);
  ModelFamily fam = ModelFamily::default_only(4);
  ProfileOptions opt;
  opt.moment_matched = false;
  ProfileTable t = likelihood_profile(fam, s, psi, ObservedFactors::zeros(30), "a", Vector::Constant(1, 0.5), opt);
  ModelParameters at = default_only_parameters(psi.levels.col(3), 0.3, 0.5);
  EXPECT_EQ(t.loglik(0), laplace_loglik(fam, s, at, ObservedFactors::zeros(30)).loglik);
}

TEST(Profile, ParticleProfilesShareTheSeed) {
  ModelParameters psi;
  MigrationSeries s = high_default_series(20, 3, &psi);
  ModelFamily fam = ModelFamily::default_only(4);
  ProfileOptions opt;
  opt.method = ProfileMethod::PFImportance;
  opt.particles = 300;
  opt.seed = 5;
  ProfileTable a = likelihood_profile(fam, s, psi, ObservedFactors::zeros(20), "k", Vector{{0.2, 0.3}}, opt);
  ProfileTable b = likelihood_profile(fam, s, psi, ObservedFactors::zeros(20), "k", Vector{{0.2, 0.3}}, opt);
  EXPECT_EQ(a.loglik, b.loglik);
  EXPECT_EQ(a.particles, 300u);
}

TEST(Profile, EmptyRangeAndUnknownAxisRejected) {
  ModelParameters psi;
  MigrationSeries s = high_default_series(10, 4, &psi);
  ModelFamily fam = ModelFamily::default_only(4);
  EXPECT_THROW(likelihood_profile(fam, s, psi, ObservedFactors::zeros(10), "k", Vector()), ConfigError);
  EXPECT_THROW(likelihood_profile(fam, s, psi, ObservedFactors::zeros(10), "rho", Vector::Constant(1, 0.1)),
               ConfigError);
  EXPECT_THROW(profile_method_from_string("exact"), ConfigError);
}

TEST(Stepwise, DefaultStepEqualsCollapsedMle) {
  ModelFamily fam = ModelFamily::two_factor(4);
  LongRunAverages target = averages_from_targets(Vector{{0.01, 0.04, 0.1}}, nd_matrix());
  ModelParameters psi = parameters_from_free(fam, target, Vector{{0.7, 0.8, 0.3, 0.2, 0.4}});
  std::mt19937_64 rng(6);
  auto sc = simulate_migrations(fam, psi, Eigen::VectorXi{{100000, 10000, 5000}}, 60, rng, ObservedFactors::zeros(60));
  StepwiseResult sw = stepwise_calibrate(sc.series, ObservedFactors::zeros(60));
  ModelFamily fd = ModelFamily::default_only(4);
  MigrationSeries collapsed = collapse_to_default_only(sc.series);
  MLEResult direct = mle_laplace(fd, collapsed, ObservedFactors::zeros(60),
                                 parameters_from_free(fd, long_run_averages(sc.series), Vector{{0.5, 0.5}}));
  EXPECT_EQ(sw.estimate(0), direct.estimate(0));
  EXPECT_EQ(sw.estimate(2), direct.estimate(1));
  EXPECT_LE(std::abs(sw.estimate(4)), 0.95);
}

TEST(Stepwise, UncorrelatedFactorsGiveSmallRho) {
  ModelFamily fam = ModelFamily::two_factor(4);
  LongRunAverages target = averages_from_targets(Vector{{0.01, 0.04, 0.1}}, nd_matrix());
  ModelParameters psi = parameters_from_free(fam, target, Vector{{0.7, 0.8, 0.3, 0.2, 0.0}});
  const std::size_t n = 150;
  std::mt19937_64 rng(7);
  auto sc = simulate_migrations(fam, psi, Eigen::VectorXi{{100000, 10000, 5000}}, n, rng, ObservedFactors::zeros(n));
  StepwiseResult sw = stepwise_calibrate(sc.series, ObservedFactors::zeros(n));
  EXPECT_LE(std::abs(sw.estimate(4)), 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Stepwise, ResidualCorrelationNeedsThreePeriods) {
  std::vector<Vector> x{Vector::Zero(1), Vector::Ones(1)};
  EXPECT_THROW(residual_correlation(x, 0.5, x, 0.5), DomainError);
}

TEST(Study, DeterministicAndWorkerIndependent) {
  StudyConfig cfg;
  cfg.family = ModelFamily::default_only(4);
  cfg.truth = parameters_from_free(cfg.family, averages_from_targets(Vector{{0.01, 0.04, 0.1}}, Matrix()),
                                   Vector{{0.7, 0.3}});
  cfg.populations = Eigen::VectorXi{{100000, 10000, 5000}};
  cfg.periods = 40;
  cfg.scenarios = 3;
  cfg.seed = 8;
  cfg.workers = 1;
  StudyResult a = scenario_study(cfg);
  cfg.workers = 3;
  StudyResult b = scenario_study(cfg);
  EXPECT_EQ(a.estimates, b.estimates);
  EXPECT_EQ(a.successes, 3u);
  EXPECT_EQ(a.names, (std::vector<std::string>{"a", "k"}));
}

TEST(Study, SingleScenarioWarnsAndReportsZeroStd) {
  StudyConfig cfg;
  cfg.family = ModelFamily::default_only(4);
  cfg.truth = parameters_from_free(cfg.family, averages_from_targets(Vector{{0.01, 0.04, 0.1}}, Matrix()),
                                   Vector{{0.7, 0.3}});
  cfg.populations = Eigen::VectorXi{{100000, 10000, 5000}};
  cfg.periods = 30;
  cfg.scenarios = 1;
  StudyResult r = scenario_study(cfg);
  ASSERT_EQ(r.successes, 1u);
  EXPECT_EQ(r.std, Vector::Zero(2));
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Study, ZeroScenariosRejected) {
  StudyConfig cfg;
  cfg.scenarios = 0;
  EXPECT_THROW(scenario_study(cfg), ConfigError);
  EXPECT_THROW(study_method_from_string("exact"), ConfigError);
}

TEST(Parallel, EveryIndexVisitedOnce) {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, LowestFailingIndexRethrown) {
  try {
    parallel_for(10, 3, [](std::size_t i) {
      if (i == 4 || i == 7) throw DomainError("task " + std::to_string(i));
    });
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_STREQ(e.what(), "task 4");
  }
}

TEST(Parallel, DerivedSeedsDistinctAndStable) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
}
