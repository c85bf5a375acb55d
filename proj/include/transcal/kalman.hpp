#pragma once

// Linear-Gaussian state space filtering:
//   y_k = c_k + Z_k x_k + eps_k,   eps_k ~ N(0, H_k)
//   x_k = A_k x_{k-1} + eta_k,     eta_k ~ N(0, Q_k),   x_0 ~ N(a0, P0)
// A period with an empty y_k carries no observation.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "transcal/common.hpp"

namespace transcal {

struct LinearGaussianSSM {
  std::vector<Vector> y;
  std::vector<Vector> offset;       // c_k
  std::vector<Matrix> design;       // Z_k
  std::vector<Matrix> obs_cov;      // H_k
  std::vector<Matrix> transition;   // A_k
  std::vector<Matrix> state_cov;    // Q_k
  Vector a0;
  Matrix P0;

  std::size_t period_count() const { return y.size(); }
  Eigen::Index state_dim() const { return a0.size(); }

  /// Time-invariant model with zero offsets.
  static LinearGaussianSSM time_invariant(std::vector<Vector> obs, const Matrix& z, const Matrix& h, const Matrix& a,
                                          const Matrix& q, Vector init_mean, Matrix init_cov) {
    LinearGaussianSSM m;
    const std::size_t n = obs.size();
    m.y = std::move(obs);
    m.offset.assign(n, Vector::Zero(z.rows()));
    m.design.assign(n, z);
    m.obs_cov.assign(n, h);
    m.transition.assign(n, a);
    m.state_cov.assign(n, q);
    m.a0 = std::move(init_mean);
    m.P0 = std::move(init_cov);
    return m;
  }

  void validate() const {
    const std::size_t n = y.size();
    const Eigen::Index s = a0.size();
    if (offset.size() != n || design.size() != n || obs_cov.size() != n || transition.size() != n ||
        state_cov.size() != n)
      throw DimensionError("state space model: per-period arrays must all have n entries");
    if (P0.rows() != s || P0.cols() != s) throw DimensionError("state space model: P0 must be s x s");
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::Index p = y[k].size();
      if (transition[k].rows() != s || transition[k].cols() != s || state_cov[k].rows() != s ||
          state_cov[k].cols() != s)
        throw DimensionError("state space model: A_k and Q_k must be s x s");
      if (p == 0) continue;
      if (offset[k].size() != p || design[k].rows() != p || design[k].cols() != s || obs_cov[k].rows() != p ||
          obs_cov[k].cols() != p)
        throw DimensionError("state space model: observation dimensions inconsistent at period " +
                             std::to_string(k + 1));
    }
  }
};

struct FilterOutput {
  std::vector<Vector> predicted_mean;  // x_{k|k-1}
  std::vector<Matrix> predicted_cov;   // P_{k|k-1}
  std::vector<Vector> filtered_mean;   // x_{k|k}
  std::vector<Matrix> filtered_cov;    // P_{k|k}
  std::vector<double> period_loglik;
  double loglik = 0.0;
};

inline FilterOutput kalman_filter(const LinearGaussianSSM& ssm) {
  ssm.validate();
  const std::size_t n = ssm.period_count();
  const double log2pi = std::log(2.0 * std::numbers::pi);
  FilterOutput out;
  out.predicted_mean.reserve(n);
  out.predicted_cov.reserve(n);
  out.filtered_mean.reserve(n);
  out.filtered_cov.reserve(n);
  out.period_loglik.reserve(n);

  Vector x = ssm.a0;
  Matrix p = ssm.P0;
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix& a = ssm.transition[k];
    Vector xp = a * x;
    Matrix pp = symmetrize(a * p * a.transpose() + ssm.state_cov[k]);
    out.predicted_mean.push_back(xp);
    out.predicted_cov.push_back(pp);

    const Eigen::Index dim = ssm.y[k].size();
    if (dim == 0) {
      x = xp;
      p = pp;
      out.period_loglik.push_back(0.0);
    } else {
      const Matrix& z = ssm.design[k];
      Vector v = ssm.y[k] - ssm.offset[k] - z * xp;
      Matrix zp = z * pp;
      Matrix s = symmetrize(zp * z.transpose() + ssm.obs_cov[k]);
      Eigen::LLT<Matrix> llt(s);
      if (llt.info() != Eigen::Success) throw ConditioningError(k, "innovation covariance is not positive definite");
      const Matrix& l = llt.matrixL();
      const double diag_min = l.diagonal().minCoeff();
      const double diag_max = l.diagonal().maxCoeff();
      if (!(diag_min > 0.0) || diag_min < 1e-12 * diag_max)
        throw ConditioningError(k, "innovation covariance is numerically singular");
      Vector sinv_v = llt.solve(v);
      Matrix sinv_zp = llt.solve(zp);  // S^{-1} Z P
      x = xp + sinv_zp.transpose() * v;
      p = symmetrize(pp - zp.transpose() * sinv_zp);
      const double logdet = 2.0 * l.diagonal().array().log().sum();
      out.period_loglik.push_back(-0.5 * (static_cast<double>(dim) * log2pi + logdet + v.dot(sinv_v)));
    }
    out.loglik += out.period_loglik.back();
    out.filtered_mean.push_back(x);
    out.filtered_cov.push_back(p);
  }
  return out;
}

struct SmootherOutput {
  std::vector<Vector> mean;  // x_{k|n}
  std::vector<Matrix> cov;   // P_{k|n}
};

/// Fixed-interval (Rauch-Tung-Striebel) smoother over a completed filter pass.
inline SmootherOutput kalman_smoother(const LinearGaussianSSM& ssm, const FilterOutput& filt) {
  const std::size_t n = ssm.period_count();
  SmootherOutput out;
  out.mean.resize(n);
  out.cov.resize(n);
  if (n == 0) return out;
  out.mean[n - 1] = filt.filtered_mean[n - 1];
  out.cov[n - 1] = filt.filtered_cov[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    const Matrix& pp_next = filt.predicted_cov[k + 1];
    Matrix rhs = ssm.transition[k + 1] * filt.filtered_cov[k];  // A P_{k|k}
    Matrix jt;                                                  // J' = P_{k+1|k}^{-1} A P_{k|k}
    Eigen::LLT<Matrix> llt(pp_next);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 1e-14) {
      jt = llt.solve(rhs);
    } else {
      jt = pp_next.completeOrthogonalDecomposition().solve(rhs);
    }
    out.mean[k] = filt.filtered_mean[k] + jt.transpose() * (out.mean[k + 1] - filt.predicted_mean[k + 1]);
    out.cov[k] = symmetrize(filt.filtered_cov[k] + jt.transpose() * (out.cov[k + 1] - pp_next) * jt);
  }
  return out;
}

/// Independent draws from N(x_{k|k}, P_{k|k}) for every period; one s x count
/// matrix per period.
template <class Rng>
std::vector<Matrix> kalman_posterior_draws(const FilterOutput& filt, std::size_t count, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Matrix> draws;
  draws.reserve(filt.filtered_mean.size());
  for (std::size_t k = 0; k < filt.filtered_mean.size(); ++k) {
    const Eigen::Index s = filt.filtered_mean[k].size();
    Matrix root = psd_sqrt(filt.filtered_cov[k]);
    Matrix z(s, static_cast<Eigen::Index>(count));
    for (Eigen::Index c = 0; c < z.cols(); ++c)
      for (Eigen::Index i = 0; i < s; ++i) z(i, c) = gauss(rng);
    Matrix d = root * z;
    d.colwise() += filt.filtered_mean[k];
    draws.push_back(std::move(d));
  }
  return draws;
}

}  // namespace transcal
