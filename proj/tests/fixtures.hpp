#pragma once

// Shared test fixtures: random single-period family cases and a quadrature
// evaluation of the two-period default-only likelihood.

#include <random>

#include "oracles.hpp"
#include "transcal/transcal.hpp"

namespace fixture {

using namespace transcal;

// Random family instance: parameters, one period of counts, signal vector in
// the modelled layout.
struct Case {
  ModelFamily family;
  ModelParameters psi;
  MigrationSeries series;
  Vector theta;
};

inline Case random_case(int which, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> cnt(0, 60);
  const int r = 3 + which % 3;
  Case c;
  switch (which % 4) {
    case 0: {
      c.family = ModelFamily::default_only(r);
      Vector d(r - 1);
      for (int i = 0; i < r - 1; ++i) d(i) = -1.0 - 1.5 * unif(rng);
      c.psi = default_only_parameters(d, 0.3, 0.7);
      break;
    }
    case 1:
    case 3: {
      c.family = which % 4 == 1 ? ModelFamily::two_factor(r) : ModelFamily::performing(r);
      Matrix nd(r - 1, r - 1);
      for (int i = 0; i < r - 1; ++i) {
        for (int j = 0; j < r - 1; ++j) nd(i, j) = 0.2 + unif(rng);
        nd.row(i) /= nd.row(i).sum();
      }
      Vector pd(r - 1);
      for (int i = 0; i < r - 1; ++i) pd(i) = 0.02 + 0.1 * unif(rng);
      LongRunAverages avg = averages_from_targets(pd, nd);
      if (c.family.kind == FamilyKind::TwoFactorProbit)
        c.psi = parameters_from_free(c.family, avg, Vector{{0.5, 0.5, 0.3, 0.3, 0.1}});
      else
        c.psi = parameters_from_free(c.family, avg, Vector{{0.5, 0.3}});
      break;
    }
    case 2: {
      c.family = ModelFamily::logistic(r, 2);
      Matrix levels(r - 1, r);
      for (int i = 0; i < r - 1; ++i)
        for (int j = 0; j < r; ++j) levels(i, j) = unif(rng) * 2.0 - 1.0;
      Matrix load((r - 1) * r, 2);
      for (auto& v : load.reshaped()) v = 0.6 * unif(rng) - 0.3;
      c.psi = logistic_parameters(levels, load, Vector{{0.5, 0.6}});
      break;
    }
  }
  CountMatrix m(r - 1, r);
  for (int i = 0; i < r - 1; ++i)
    for (int j = 0; j < r; ++j) m(i, j) = cnt(rng);
  c.series = MigrationSeries::from_counts(r, {m});
  c.theta.resize(c.family.modelled_count());
  for (Eigen::Index j = 0; j < c.theta.size(); ++j) c.theta(j) = unif(rng) - 0.5;
  return c;
}

// log p(M_k | theta) as a sum of row log-likelihoods, with the logistic
// contrast layout expanded to full cells (default cell signal 0).
inline double row_sum_loglik(const Case& c, const Vector& theta) {
  const int r = c.family.ratings;
  double v = 0.0;
  for (int i = 0; i < r - 1; ++i) {
    Vector th;
    switch (c.family.kind) {
      case FamilyKind::DefaultOnlyProbit: th = theta.segment(i, 1); break;
      case FamilyKind::TwoFactorProbit:
      case FamilyKind::PerformingProbit: th = theta; break;
      case FamilyKind::MultiFactorLogistic:
        th = Vector::Zero(r);
        th.head(r - 1) = theta.segment(static_cast<Eigen::Index>(i) * (r - 1), r - 1);
        break;
    }
    Vector levels = c.family.kind == FamilyKind::MultiFactorLogistic ? Vector() : Vector(c.psi.levels.row(i).transpose());
    Vector p = transition_probs(c.family, levels, th);
    v += row_loglik(c.family, c.series.counts[0].row(i).cast<double>().transpose(), p);
  }
  return v;
}

inline MigrationSeries binomial_series(const std::vector<std::pair<int, int>>& rows) {
  std::vector<CountMatrix> counts;
  for (auto [n, m] : rows) {
    CountMatrix c(1, 2);
    c << n - m, m;
    counts.push_back(c);
  }
  return MigrationSeries::from_counts(2, counts);
}

inline double log_binomial(int n, int m, double t) {
  return std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) + m * std::log(oracle::Phi(t)) +
         (n - m) * std::log(oracle::Phi(-t));
}

// Quadrature evaluation of the two-period default-only likelihood.
inline double quadrature_loglik(const MigrationSeries& series, double d, double k, double a) {
  oracle::Mat cov(2, 2);
  cov << 1.0, a, a, 1.0;
  Eigen::LLT<oracle::Mat> llt(cov);
  auto logf = [&](const oracle::Vec& x) {
    double v = oracle::mvn_logpdf(x, oracle::Vec::Zero(2), cov);
    for (int t = 0; t < 2; ++t) {
      const auto& c = series.counts[static_cast<std::size_t>(t)];
      v += log_binomial(static_cast<int>(c(0, 0) + c(0, 1)), static_cast<int>(c(0, 1)), d + k * x(t));
    }
    return v;
  };
  oracle::Mat neg;
  oracle::Vec center = oracle::fd_newton_max(logf, oracle::Vec::Zero(2), &neg);
  oracle::Mat l = Eigen::LLT<oracle::Mat>(neg.inverse()).matrixL();
  return oracle::gh_log_integral_2d(logf, center, l, 64);
}

// Random linear-Gaussian model with n <= 5 periods, s <= 3 states, p <= 3
// observations per period.
inline Matrix random_spd(Eigen::Index d, std::mt19937_64& rng, double floor = 0.1) {
  std::normal_distribution<double> g;
  Matrix b(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) b(i, j) = g(rng);
  return b * b.transpose() / static_cast<double>(d) + floor * Matrix::Identity(d, d);
}

struct Instance {
  LinearGaussianSSM ssm;
  Matrix z, h, a, q;
};

inline Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ndist(1, 5), sdist(1, 3), pdist(1, 3);
  std::normal_distribution<double> g;
  const int n = ndist(rng), s = sdist(rng), p = pdist(rng);
  Instance in;
  in.a = Matrix(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) in.a(i, j) = 0.4 * g(rng) / s;
  in.q = random_spd(s, rng);
  in.z = Matrix(p, s);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < s; ++j) in.z(i, j) = g(rng);
  in.h = random_spd(p, rng);
  std::vector<Vector> y(static_cast<std::size_t>(n));
  for (auto& v : y) {
    v.resize(p);
    for (int i = 0; i < p; ++i) v(i) = 2.0 * g(rng);
  }
  Vector a0(s);
  for (int i = 0; i < s; ++i) a0(i) = g(rng);
  in.ssm = LinearGaussianSSM::time_invariant(y, in.z, in.h, in.a, in.q, a0, random_spd(s, rng, 0.0));
  for (auto& c : in.ssm.offset)
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = g(rng);
  return in;
}

}  // namespace fixture
