#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "transcal/transcal.hpp"

using namespace transcal;
using namespace fixture;

namespace {

Matrix nd_targets() { return Matrix{{0.85, 0.1, 0.05}, {0.2, 0.6, 0.2}, {0.1, 0.2, 0.7}}; }

ModelParameters two_factor_at(double kd, double kp) {
  LongRunAverages avg = averages_from_targets(Vector{{0.01, 0.04, 0.1}}, nd_targets());
  return parameters_from_free(ModelFamily::two_factor(4), avg, Vector{{0.7, 0.8, kd, kp, 0.4}});
}

LatentPath single(const Vector& x) {
  LatentPath p;
  p.x.push_back(x);
  return p;
}

}  // namespace

TEST(SignalFromFactors, ZeroCase) {
  ModelParameters psi = default_only_parameters(Vector::Zero(1), 1.0, 0.5);
  auto path = signal_from_factors(ModelFamily::default_only(2), psi, single(Vector::Zero(1)), ObservedFactors::zeros(1));
  EXPECT_EQ(path.theta[0](0), 0.0);
}

TEST(SignalFromFactors, DefaultOnlyDirectEvaluation) {
  ModelParameters psi = default_only_parameters(Vector::Constant(1, -1.8278), 0.3, 0.7);
  auto path = signal_from_factors(ModelFamily::default_only(2), psi, single(Vector::Ones(1)), ObservedFactors::zeros(1));
  EXPECT_NEAR(path.theta[0](0), -1.5278, 1e-12);
}

TEST(SignalFromFactors, TwoFactorLoadings) {
  ModelParameters psi = two_factor_at(0.3, 0.2);
  auto path = signal_from_factors(ModelFamily::two_factor(4), psi, single(Vector{{1.0, -1.0}}), ObservedFactors::zeros(1));
  EXPECT_NEAR(path.theta[0](0), 0.3, 1e-15);
  EXPECT_NEAR(path.theta[0](1), -0.2, 1e-15);
}

TEST(SignalFromFactors, DimensionMismatchThrows) {
  ModelParameters psi = two_factor_at(0.3, 0.2);
  EXPECT_THROW(signal_from_factors(ModelFamily::two_factor(4), psi, single(Vector::Ones(3)), ObservedFactors::zeros(1)),
               DimensionError);
}

TEST(TransitionProbs, LogisticSymmetry) {
  Vector p = transition_probs(ModelFamily::logistic(4, 1), Vector(), Vector::Constant(4, 1.7));
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(p(j), 0.25, 1e-15);
}

TEST(TransitionProbs, LogisticShiftInvarianceAndOverflowSafety) {
  Vector th{{1.0, -2.0, 0.5, 3.0}};
  Vector p0 = transition_probs(ModelFamily::logistic(4, 1), Vector(), th);
  Vector p1 = transition_probs(ModelFamily::logistic(4, 1), Vector(), (th.array() + 800.0).matrix());
  EXPECT_TRUE(p0.isApprox(p1, 1e-14));
}

TEST(TransitionProbs, DefaultOnlyAtZero) {
  Vector p = transition_probs(ModelFamily::default_only(2), Vector(), Vector::Zero(1));
  EXPECT_DOUBLE_EQ(p(1), 0.5);
}

TEST(TransitionProbs, TwoFactorThresholdInversion) {
  ModelFamily fam = ModelFamily::two_factor(4);
  Vector levels = probit_levels_from_averages(Vector{{0.85, 0.1, 0.05}}, 0.01);
  // independent inversion of the cumulative targets
  EXPECT_NEAR(oracle::Phi(levels(1)), 0.15, 1e-12);
  EXPECT_NEAR(oracle::Phi(levels(2)), 0.05, 1e-12);
  EXPECT_NEAR(oracle::Phi(levels(3)), 0.01, 1e-12);
  Vector p = transition_probs(fam, levels, Vector::Zero(2));
  EXPECT_NEAR(p(0), 0.99 * 0.85, 1e-12);
  EXPECT_NEAR(p(1), 0.99 * 0.10, 1e-12);
  EXPECT_NEAR(p(2), 0.99 * 0.05, 1e-12);
  EXPECT_NEAR(p(3), 0.01, 1e-12);
}

TEST(TransitionProbs, NonMonotoneThresholdsThrow) {
  Vector levels{{kInf, -1.0, 0.5, -2.0}};
  EXPECT_THROW(transition_probs(ModelFamily::two_factor(4), levels, Vector::Zero(2)), DomainError);
}

TEST(TransitionProbs, RowsSumToOneOverWideSignalRange) {
  ModelFamily fam = ModelFamily::two_factor(5);
  Vector levels = probit_levels_from_averages(Vector{{0.7, 0.15, 0.1, 0.05}}, 0.03);
  for (double td = -30; td <= 30; td += 2.5)
    for (double tp = -30; tp <= 30; tp += 2.5) {
      Vector p = transition_probs(fam, levels, Vector{{td, tp}});
      EXPECT_NEAR(p.sum(), 1.0, 1e-12);
      EXPECT_GE(p.minCoeff(), 0.0);
      EXPECT_LE(p.maxCoeff(), 1.0);
    }
}

TEST(TransitionProbs, DefaultProbabilityIncreasesWithSignal) {
  double prev = -1;
  for (double t = -8; t <= 8; t += 0.25) {
    double pd = transition_probs(ModelFamily::default_only(2), Vector(), Vector::Constant(1, t))(1);
    EXPECT_GT(pd, prev);
    prev = pd;
  }
}

TEST(RowLoglik, AllSurvivingAtHalf) {
  Vector m{{10.0, 0.0}};
  Vector p{{0.5, 0.5}};
  EXPECT_NEAR(row_loglik(ModelFamily::default_only(2), m, p), -6.931472, 1e-6);
}

TEST(RowLoglik, CertainEvent) {
  Vector m{{7.0, 0.0, 0.0, 0.0}};
  Vector p{{1.0, 0.0, 0.0, 0.0}};
  EXPECT_EQ(row_loglik(ModelFamily::two_factor(4), m, p), 0.0);
}

TEST(RowLoglik, ImpossibleEventIsNegativeInfinity) {
  Vector m{{6.0, 1.0, 0.0, 0.0}};
  Vector p{{1.0, 0.0, 0.0, 0.0}};
  EXPECT_EQ(row_loglik(ModelFamily::two_factor(4), m, p), -kInf);
}

TEST(RowLoglik, MatchesFactorialRatioOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> m(4, 0);
    std::uniform_int_distribution<int> cell(0, 3);
    for (int c = 0; c < 20; ++c) ++m[static_cast<std::size_t>(cell(rng))];
    std::vector<double> p(4);
    double s = 0;
    for (auto& v : p) s += (v = unif(rng));
    for (auto& v : p) v /= s;
    Vector mv(4), pv(4);
    for (int j = 0; j < 4; ++j) {
      mv(j) = m[static_cast<std::size_t>(j)];
      pv(j) = p[static_cast<std::size_t>(j)];
    }
    EXPECT_NEAR(row_loglik(ModelFamily::two_factor(4), mv, pv), oracle::multinomial_logpmf(m, p), 1e-12);
  }
}

TEST(SignalGradHess, ScoreVanishesAtBinomialMle) {
  // m/N = 0.25 and Phi(theta) = 0.25 at theta = Phi^{-1}(0.25)
  ModelParameters psi = default_only_parameters(Vector::Zero(1), 1.0, 0.5);
  CountMatrix c(1, 2);
  c << 75, 25;
  auto series = MigrationSeries::from_counts(2, {c});
  SignalPath th{{Vector::Constant(1, normal::quantile(0.25))}};
  auto d = signal_grad_hess(ModelFamily::default_only(2), series, th, psi);
  EXPECT_NEAR(d.gradient[0](0), 0.0, 1e-9);
  EXPECT_LT(d.hessian[0](0, 0), 0.0);
}

TEST(SignalGradHess, FiniteDifferenceAgreementAcrossFamilies) {
  std::mt19937_64 rng(17);
  for (int which = 0; which < 40; ++which) {
    Case c = random_case(which, rng);
    MultinomialObservation obs(c.family, c.series, c.psi.levels);
    Vector g;
    Matrix h;
    const double v = obs.period_derivatives(0, c.theta, g, h);
    EXPECT_NEAR(v, row_sum_loglik(c, c.theta), 1e-9 * std::max(1.0, std::abs(v)));
    EXPECT_TRUE(h.isApprox(h.transpose(), 1e-12)) << "family " << which;
    const double step = 1e-5;
    for (Eigen::Index j = 0; j < c.theta.size(); ++j) {
      Vector e = Vector::Zero(c.theta.size());
      e(j) = step;
      const double fd = (row_sum_loglik(c, c.theta + e) - row_sum_loglik(c, c.theta - e)) / (2 * step);
      EXPECT_LE(std::abs(g(j) - fd), 1e-6 * std::max(1.0, std::abs(fd))) << "case " << which << " component " << j;
      Vector gp, gm;
      Matrix hp, hm;
      obs.period_derivatives(0, c.theta + e, gp, hp);
      obs.period_derivatives(0, c.theta - e, gm, hm);
      Vector hcol = (gp - gm) / (2 * step);
      EXPECT_LE((h.col(j) - hcol).lpNorm<Eigen::Infinity>(), 1e-5 * std::max(1.0, hcol.lpNorm<Eigen::Infinity>()))
          << "case " << which << " column " << j;
    }
  }
}

TEST(SignalGradHess, LogisticFullCellLayoutMatchesClosedForm) {
  ModelFamily fam = ModelFamily::logistic(3, 1);
  Matrix levels = Matrix::Zero(2, 3);
  ModelParameters psi = logistic_parameters(levels, Matrix::Constant(6, 1, 0.1), Vector::Constant(1, 0.5));
  CountMatrix c(2, 3);
  c << 5, 3, 2, 1, 8, 1;
  auto series = MigrationSeries::from_counts(3, {c});
  SignalPath th{{Vector{{0.1, -0.2, 0.3, 0.0, 0.5, -0.5}}}};
  auto d = signal_grad_hess(fam, series, th, psi);
  Vector p = transition_probs(fam, Vector(), Vector{{0.1, -0.2, 0.3}});
  EXPECT_NEAR(d.gradient[0](0), 5 - 10 * p(0), 1e-12);
  EXPECT_NEAR(d.hessian[0](0, 1), 10 * p(0) * p(1), 1e-12);
  EXPECT_NEAR(d.hessian[0](0, 3), 0.0, 0.0);
}

TEST(SignalGradHess, HessianNegativeSemiDefiniteAtInteriorMaximum) {
  // two-factor row at counts proportional to its own probabilities
  ModelFamily fam = ModelFamily::two_factor(4);
  ModelParameters psi = two_factor_at(0.3, 0.2);
  CountMatrix c(3, 4);
  c << 8415, 990, 495, 100, 1920, 5760, 1920, 400, 810, 1620, 5670, 900;
  auto series = MigrationSeries::from_counts(4, {c});
  MultinomialObservation obs(fam, series, psi.levels);
  auto f = [&](const Vector& t) { return obs.period_loglik(0, t); };
  Vector mode = oracle::fd_newton_max(f, Vector::Zero(2));
  Vector g;
  Matrix h;
  obs.period_derivatives(0, mode, g, h);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 0.0);
}
