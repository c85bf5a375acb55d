#pragma once

// Scenario generation (latent AR(1) paths, multinomial migration draws) and
// the moment-matching map from long-run average rates to probit levels,
// based on E[Phi(X)] = Phi(mu / sqrt(1 + sigma^2)) for X ~ N(mu, sigma^2).

#include <cmath>
#include <random>
#include <vector>

#include "transcal/common.hpp"
#include "transcal/domain.hpp"
#include "transcal/models.hpp"
#include "transcal/normal.hpp"

namespace transcal {

/// d = sqrt(1 + K^2) * Phi^{-1}(rbar).
inline double derive_d_from_average(double rbar, double k) {
  if (!(rbar > 0.0 && rbar < 1.0)) throw DomainError("average rate must lie in (0, 1)");
  return std::sqrt(1.0 + k * k) * normal::quantile(rbar);
}

inline Vector derive_d_from_average(const Vector& rbar, double k) {
  Vector d(rbar.size());
  for (Eigen::Index i = 0; i < rbar.size(); ++i) d(i) = derive_d_from_average(rbar(i), k);
  return d;
}

/// Sample averages of observed default rates and of cumulative performing
/// migration rates given no default (columns 1..R-2, tail sums).
struct LongRunAverages {
  Vector default_rate;     // R-1
  Matrix cumulative_rate;  // (R-1) x R, columns 1..R-2 used
};

inline LongRunAverages long_run_averages(const MigrationSeries& series) {
  const int rows = series.performing_count();
  const int r = series.ratings;
  LongRunAverages avg;
  avg.default_rate = Vector::Zero(rows);
  avg.cumulative_rate = Matrix::Zero(rows, r);
  Eigen::VectorXi pd_periods = Eigen::VectorXi::Zero(rows);
  Eigen::VectorXi nd_periods = Eigen::VectorXi::Zero(rows);
  for (std::size_t k = 0; k < series.period_count(); ++k) {
    const CountMatrix& c = series.counts[k];
    for (int i = 0; i < rows; ++i) {
      const double n = static_cast<double>(c.row(i).sum());
      const double defaults = static_cast<double>(c(i, r - 1));
      if (n > 0.0) {
        avg.default_rate(i) += defaults / n;
        ++pd_periods(i);
      }
      const double nd = n - defaults;
      if (nd > 0.0) {
        double tail = 0.0;
        for (int j = r - 2; j >= 1; --j) {
          tail += static_cast<double>(c(i, j));
          avg.cumulative_rate(i, j) += tail / nd;
        }
        ++nd_periods(i);
      }
    }
  }
  for (int i = 0; i < rows; ++i) {
    if (pd_periods(i) > 0) avg.default_rate(i) /= pd_periods(i);
    if (nd_periods(i) > 0) avg.cumulative_rate.row(i) /= nd_periods(i);
  }
  return avg;
}

/// Long-run averages from target default rates (R-1) and a target matrix of
/// performing migration probabilities given no default ((R-1) x (R-1)).
inline LongRunAverages averages_from_targets(const Vector& pd, const Matrix& nd) {
  const Eigen::Index rows = pd.size();
  if (nd.size() != 0 && (nd.rows() != rows || nd.cols() != rows))
    throw DimensionError("migration targets must be (R-1) x (R-1)");
  LongRunAverages avg;
  avg.default_rate = pd;
  avg.cumulative_rate = Matrix::Zero(rows, rows + 1);
  if (nd.size() == 0) return avg;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double total = nd.row(i).sum();
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("rows of the migration targets must sum to one");
    double tail = 0.0;
    for (Eigen::Index j = rows - 1; j >= 1; --j) {
      tail += nd(i, j);
      avg.cumulative_rate(i, j) = tail;
    }
  }
  return avg;
}

/// Probit levels matched to long-run averages given the loadings (k_default
/// scales the default column, k_performing the performing thresholds).
inline Matrix moment_matched_levels(const ModelFamily& family, const LongRunAverages& avg, double k_default,
                                    double k_performing) {
  const int rows = family.performing_count();
  const int r = family.ratings;
  Matrix levels = Matrix::Zero(rows, r);
  const bool with_default = family.kind != FamilyKind::PerformingProbit;
  const bool with_performing =
      family.kind == FamilyKind::TwoFactorProbit || family.kind == FamilyKind::PerformingProbit;
  if (family.kind == FamilyKind::MultiFactorLogistic)
    throw DomainError("moment matching of levels is defined for the probit families only");
  for (int i = 0; i < rows; ++i) {
    if (with_default) levels(i, r - 1) = derive_d_from_average(avg.default_rate(i), k_default);
    if (with_performing) {
      levels(i, 0) = kInf;
      for (int j = 1; j < r - 1; ++j) levels(i, j) = derive_d_from_average(avg.cumulative_rate(i, j), k_performing);
    }
  }
  return levels;
}

/// x_0 ~ N(a0, P0), x_k = A x_{k-1} + eta_k, eta_k ~ N(0, Q).
/// With `renormalize`, the centred sample covariance (1/n normalization) of
/// the drawn innovations is mapped onto Q exactly and their sample mean is
/// removed.
template <class Rng>
LatentPath simulate_latent(const Matrix& a, const Matrix& q, std::size_t n, Rng& rng, bool renormalize,
                           const Vector& a0, const Matrix& p0) {
  const Eigen::Index s = a.rows();
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](Eigen::Index dim) {
    Vector z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z(i) = gauss(rng);
    return z;
  };
  LatentPath path;
  path.x0 = a0 + psd_sqrt(p0) * draw(s);
  const Matrix q_root = psd_sqrt(q);
  path.eta.reserve(n);
  for (std::size_t k = 0; k < n; ++k) path.eta.push_back(q_root * draw(s));

  if (renormalize && n > static_cast<std::size_t>(s)) {
    Vector mean = Vector::Zero(s);
    for (const auto& e : path.eta) mean += e;
    mean /= static_cast<double>(n);
    Matrix cov = Matrix::Zero(s, s);
    for (const auto& e : path.eta) cov += (e - mean) * (e - mean).transpose();
    cov /= static_cast<double>(n);
    Eigen::LLT<Matrix> sample(cov);
    Eigen::LLT<Matrix> target(q);
    if (sample.info() == Eigen::Success) {
      // whiten with the sample factor, recolour with a square root of Q
      Matrix target_root = target.info() == Eigen::Success ? Matrix(target.matrixL()) : q_root;
      Matrix sample_l = sample.matrixL();
      for (auto& e : path.eta) {
        Vector w = sample_l.triangularView<Eigen::Lower>().solve(e - mean);
        e = target_root * w;
      }
    }
  }

  path.x.reserve(n);
  Vector prev = path.x0;
  for (std::size_t k = 0; k < n; ++k) {
    prev = a * prev + path.eta[k];
    path.x.push_back(prev);
  }
  return path;
}

/// Stationary initial law.
template <class Rng>
LatentPath simulate_latent(const Matrix& a, const Matrix& q, std::size_t n, Rng& rng, bool renormalize = false) {
  return simulate_latent(a, q, n, rng, renormalize, Vector::Zero(a.rows()), stationary_covariance(a, q));
}

namespace detail {

template <class Rng>
void draw_multinomial(std::int64_t trials, const Vector& probs, Rng& rng, Eigen::Ref<CountMatrix> out_row) {
  std::int64_t remaining = trials;
  double mass = 1.0;
  const Eigen::Index cats = probs.size();
  for (Eigen::Index j = 0; j < cats; ++j) {
    if (j == cats - 1 || remaining == 0) {
      out_row(0, j) = (j == cats - 1) ? remaining : 0;
      if (j < cats - 1) continue;
      break;
    }
    const double p = mass > 0.0 ? std::clamp(probs(j) / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> bin(remaining, p);
    const std::int64_t draw = bin(rng);
    out_row(0, j) = draw;
    remaining -= draw;
    mass -= probs(j);
  }
}

}  // namespace detail

struct SimulatedScenario {
  MigrationSeries series;
  LatentPath latent;
};

/// Draws migration counts for a fixed cohort of `populations(i)` obligors per
/// performing rating in every period. Default-only data put every surviving
/// obligor on the diagonal (no performing migrations are modelled).
template <class Rng>
SimulatedScenario simulate_migrations(const ModelFamily& family, const ModelParameters& psi,
                                      const Eigen::VectorXi& populations, std::size_t n, Rng& rng,
                                      const ObservedFactors& u, bool renormalize = false) {
  validate_parameters(psi);
  const int rows = family.performing_count();
  const int r = family.ratings;
  if (populations.size() != rows) throw DimensionError("one population per performing rating is required");
  for (Eigen::Index i = 0; i < populations.size(); ++i)
    if (populations(i) <= 0) throw DomainError("populations must be positive");

  SimulatedScenario out;
  out.latent = simulate_latent(psi.ar, psi.innovation_cov, n, rng, renormalize, psi.initial_mean, psi.initial_cov);
  SignalPath theta = signal_from_factors(family, psi, out.latent, u);

  std::vector<CountMatrix> counts;
  counts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    CountMatrix c = CountMatrix::Zero(rows, r);
    for (int i = 0; i < rows; ++i) {
      Vector th;
      switch (family.kind) {
        case FamilyKind::DefaultOnlyProbit: th = theta.theta[k].segment(i, 1); break;
        case FamilyKind::TwoFactorProbit:
        case FamilyKind::PerformingProbit: th = theta.theta[k]; break;
        case FamilyKind::MultiFactorLogistic:
          th = theta.theta[k].segment(static_cast<Eigen::Index>(i) * r, r);
          break;
      }
      Vector probs = transition_probs(family, psi.levels.row(i).transpose(), th);
      if (family.kind == FamilyKind::DefaultOnlyProbit) {
        std::binomial_distribution<std::int64_t> bin(populations(i), std::clamp(probs(1), 0.0, 1.0));
        const std::int64_t defaults = bin(rng);
        c(i, r - 1) = defaults;
        c(i, i) = populations(i) - defaults;
      } else if (family.kind == FamilyKind::PerformingProbit) {
        CountMatrix row = CountMatrix::Zero(1, r - 1);
        detail::draw_multinomial(populations(i), probs, rng, row);
        c.row(i).head(r - 1) = row;
      } else {
        CountMatrix row = CountMatrix::Zero(1, r);
        detail::draw_multinomial(populations(i), probs, rng, row);
        c.row(i) = row;
      }
    }
    counts.push_back(std::move(c));
  }
  out.series = MigrationSeries::from_counts(r, std::move(counts));
  return out;
}

/// Collapses a migration series to defaults versus survivors (survivors on
/// the diagonal), the data of the default-only submodel.
inline MigrationSeries collapse_to_default_only(const MigrationSeries& series) {
  const int rows = series.performing_count();
  const int r = series.ratings;
  std::vector<CountMatrix> counts;
  counts.reserve(series.period_count());
  for (const auto& c : series.counts) {
    CountMatrix d = CountMatrix::Zero(rows, r);
    for (int i = 0; i < rows; ++i) {
      d(i, r - 1) = c(i, r - 1);
      d(i, i) = c.row(i).head(r - 1).sum();
    }
    counts.push_back(std::move(d));
  }
  return MigrationSeries::from_counts(r, std::move(counts));
}

}  // namespace transcal
