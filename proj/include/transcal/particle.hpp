#pragma once

// Sequential Monte Carlo estimates of log p(M | psi).
//
// bootstrap_pf proposes from the AR(1) transition and weights by p(M_k | x_k).
// pf_importance proposes from the filtered posteriors N(x_{k|k}, P_{k|k}) of
// the auxiliary linear-Gaussian model built at the posterior mode and weights
// by alpha = p(M_k | x_k) p(x_k | x_{k-1}) / q(x_k). In both cases the
// period-k conditional likelihood estimate is the mean unnormalized weight.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "transcal/common.hpp"
#include "transcal/kalman.hpp"
#include "transcal/laplace.hpp"

namespace transcal {

struct ParticleCloud {
  Matrix particles;  // s x N
  Vector weights;    // normalized
  std::size_t period = 0;

  std::size_t size() const { return static_cast<std::size_t>(particles.cols()); }
};

struct PFLikelihood {
  double loglik = 0.0;
  std::vector<double> per_period;
  std::vector<double> ess_trace;
  std::vector<std::size_t> fallback_periods;  // periods proposed from the prior instead of q
  ParticleCloud final_cloud;
};

struct PFOptions {
  bool systematic_resampling = false;
  LaplaceOptions laplace;  // mode search that supplies the importance densities
};

namespace detail {

template <class Rng>
Matrix standard_normals(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix z(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) z(r, c) = gauss(rng);
  return z;
}

/// Lower factor L with L L' = S for PSD S (Cholesky, or eigen-based root when singular).
inline Matrix covariance_factor(const Matrix& s) {
  if (s.size() == 0) return s;
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  return psd_sqrt(s);
}

/// Normalizes log-weights in place into probabilities; returns log of the mean
/// unnormalized weight. -inf when every weight is zero.
inline double normalize_log_weights(const Vector& logw, Vector& w) {
  const double mx = logw.maxCoeff();
  if (!std::isfinite(mx)) {
    w.setZero(logw.size());
    return -kInf;
  }
  w = (logw.array() - mx).exp();
  const double total = w.sum();
  w /= total;
  return mx + std::log(total / static_cast<double>(logw.size()));
}

template <class Rng>
std::vector<Eigen::Index> resample_indices(const Vector& w, Rng& rng, bool systematic) {
  const Eigen::Index n = w.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::vector<double> cumulative(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += w(i);
    cumulative[static_cast<std::size_t>(i)] = acc;
  }
  cumulative.back() = 1.0 + 1e-12;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (systematic) {
    const double u0 = unif(rng) / static_cast<double>(n);
    std::size_t j = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = u0 + static_cast<double>(i) / static_cast<double>(n);
      while (cumulative[j] < u) ++j;
      idx[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(j);
    }
    return idx;
  }
  // multinomial: sorted uniforms from exponential spacings, then one merge pass
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> u(static_cast<std::size_t>(n) + 1);
  double total = 0.0;
  for (auto& e : u) {
    e = expo(rng);
    total += e;
  }
  double running = 0.0;
  std::size_t j = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    running += u[static_cast<std::size_t>(i)];
    const double point = running / total;
    while (cumulative[j] < point) ++j;
    idx[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(j);
  }
  return idx;
}

inline Matrix gather_columns(const Matrix& m, const std::vector<Eigen::Index>& idx) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(idx[i]);
  return out;
}

inline double effective_sample_size(const Vector& w) {
  const double sq = w.squaredNorm();
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

/// Log-density of N(mean, L L') at the columns of x, with L lower triangular.
inline Vector gaussian_logpdf_columns(const Matrix& x, const Matrix& mean_cols, const Matrix& l) {
  const Eigen::Index s = x.rows();
  const double log_norm =
      -0.5 * static_cast<double>(s) * std::log(2.0 * std::numbers::pi) - l.diagonal().array().log().sum();
  Matrix r = x - mean_cols;
  l.triangularView<Eigen::Lower>().solveInPlace(r);
  return (log_norm - 0.5 * r.colwise().squaredNorm().array()).transpose();
}

template <SignalObservationModel M>
void observation_logliks(const M& model, const SignalStateModel& sm, std::size_t k, const Matrix& x, Vector& out) {
  const Eigen::Index count = x.cols();
  out.resize(count);
  Matrix theta = sm.loading * x;
  theta.colwise() += sm.offset[k];
  Vector th(theta.rows());
  for (Eigen::Index i = 0; i < count; ++i) {
    th = theta.col(i);
    const double v = model.period_loglik(k, th);
    out(i) = std::isnan(v) ? -kInf : v;
  }
}

}  // namespace detail

template <SignalObservationModel M, class Rng>
PFLikelihood bootstrap_pf(const M& model, const SignalStateModel& sm, std::size_t count, Rng& rng,
                          const PFOptions& opt = {}) {
  if (count < 1) throw DomainError("particle count must be positive");
  const std::size_t n = model.period_count();
  const Eigen::Index s = sm.state_dim();
  const auto np = static_cast<Eigen::Index>(count);
  const Matrix q_factor = detail::covariance_factor(sm.innovation_cov);

  Matrix x = detail::covariance_factor(sm.initial_cov) * detail::standard_normals(s, np, rng);
  x.colwise() += sm.initial_mean;
  PFLikelihood out;
  out.per_period.reserve(n);
  out.ess_trace.reserve(n);
  Vector logw, w;
  for (std::size_t k = 0; k < n; ++k) {
    Matrix next = sm.ar * x + q_factor * detail::standard_normals(s, np, rng);
    detail::observation_logliks(model, sm, k, next, logw);
    const double ll = detail::normalize_log_weights(logw, w);
    if (!std::isfinite(ll)) throw WeightCollapseError(k);
    out.per_period.push_back(ll);
    out.loglik += ll;
    out.ess_trace.push_back(detail::effective_sample_size(w));
    if (k + 1 < n) {
      x = detail::gather_columns(next, detail::resample_indices(w, rng, opt.systematic_resampling));
    } else {
      out.final_cloud = {next, w, k};
    }
  }
  return out;
}

/// Importance-sampling particle filter given the importance densities
/// N(filtered_mean[k], filtered_cov[k]).
template <SignalObservationModel M, class Rng>
PFLikelihood pf_importance(const M& model, const SignalStateModel& sm, const FilterOutput& proposal,
                           std::size_t count, Rng& rng, const PFOptions& opt = {}) {
  if (count < 1) throw DomainError("particle count must be positive");
  const std::size_t n = model.period_count();
  if (proposal.filtered_mean.size() != n) throw DimensionError("importance densities must cover every period");
  const Eigen::Index s = sm.state_dim();
  const auto np = static_cast<Eigen::Index>(count);

  Eigen::LLT<Matrix> q_llt(sm.innovation_cov);
  const bool q_regular = q_llt.info() == Eigen::Success &&
                         Matrix(q_llt.matrixL()).diagonal().minCoeff() > 1e-12;
  const Matrix q_factor = q_regular ? Matrix(q_llt.matrixL()) : detail::covariance_factor(sm.innovation_cov);

  Matrix x = detail::covariance_factor(sm.initial_cov) * detail::standard_normals(s, np, rng);
  x.colwise() += sm.initial_mean;
  PFLikelihood out;
  out.per_period.reserve(n);
  out.ess_trace.reserve(n);
  Vector logw, w;
  for (std::size_t k = 0; k < n; ++k) {
    Matrix z = detail::standard_normals(s, np, rng);
    Matrix prior_mean = sm.ar * x;
    Matrix next;
    bool use_q = q_regular;
    Matrix p_factor;
    if (use_q) {
      Eigen::LLT<Matrix> p_llt(proposal.filtered_cov[k]);
      use_q = p_llt.info() == Eigen::Success;
      if (use_q) {
        p_factor = p_llt.matrixL();
        const double dmax = p_factor.diagonal().maxCoeff();
        use_q = p_factor.diagonal().minCoeff() > 1e-10 * std::max(1.0, dmax);
      }
    }
    if (use_q) {
      next = p_factor * z;
      next.colwise() += proposal.filtered_mean[k];
      detail::observation_logliks(model, sm, k, next, logw);
      Matrix qmean = proposal.filtered_mean[k].replicate(1, np);
      logw += detail::gaussian_logpdf_columns(next, prior_mean, q_factor) -
              detail::gaussian_logpdf_columns(next, qmean, p_factor);
    } else {
      out.fallback_periods.push_back(k);
      next = prior_mean + q_factor * z;
      detail::observation_logliks(model, sm, k, next, logw);
    }
    const double ll = detail::normalize_log_weights(logw, w);
    if (!std::isfinite(ll)) throw WeightCollapseError(k);
    out.per_period.push_back(ll);
    out.loglik += ll;
    out.ess_trace.push_back(detail::effective_sample_size(w));
    if (k + 1 < n) {
      x = detail::gather_columns(next, detail::resample_indices(w, rng, opt.systematic_resampling));
    } else {
      out.final_cloud = {next, w, k};
    }
  }
  return out;
}

/// Builds the importance densities by mode estimation, then filters.
template <SignalObservationModel M, class Rng>
PFLikelihood pf_importance(const M& model, const SignalStateModel& sm, std::size_t count, Rng& rng,
                           const PFOptions& opt = {}) {
  LaplaceLikelihood lap = laplace_loglik(model, sm, opt.laplace);
  return pf_importance(model, sm, lap.filter, count, rng, opt);
}

// ---------------------------------------------------------------------------
// Family-level entry points.

template <class Rng>
PFLikelihood bootstrap_pf(const ModelFamily& family, const MigrationSeries& series, const ModelParameters& psi,
                          const ObservedFactors& u, std::size_t count, Rng& rng, const PFOptions& opt = {}) {
  MultinomialObservation obs(family, series, psi.levels);
  return bootstrap_pf(obs, SignalStateModel::from(family, psi, u, series.period_count()), count, rng, opt);
}

template <class Rng>
PFLikelihood pf_importance(const ModelFamily& family, const MigrationSeries& series, const ModelParameters& psi,
                           const ObservedFactors& u, std::size_t count, Rng& rng, const PFOptions& opt = {}) {
  MultinomialObservation obs(family, series, psi.levels);
  return pf_importance(obs, SignalStateModel::from(family, psi, u, series.period_count()), count, rng, opt);
}

}  // namespace transcal
