#pragma once

// Laplace approximation of p(M | psi).
//
// The signal path theta is expanded to second order around the posterior mode.
// Each Newton step solves the auxiliary linear-Gaussian model
//   Mhat_k = c_k + Z x_k + eps_k,   eps_k ~ N(0, -H_k^{-1}),
//   Mhat_k = theta_k - H_k^{-1} D_k,
// whose smoothed state means give the next iterate. At the mode, the Kalman
// likelihood of that model times a constant C is the Laplace approximation.
//
// Signal components with a zero Hessian diagonal (rows with no obligors) carry
// no information and are left out of that period's observation.

#include <cmath>
#include <concepts>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "transcal/common.hpp"
#include "transcal/domain.hpp"
#include "transcal/kalman.hpp"
#include "transcal/models.hpp"
#include "transcal/optimize.hpp"
#include "transcal/simulate.hpp"

namespace transcal {

/// Per-period observation density log p(M_k | theta_k) with derivatives.
template <class M>
concept SignalObservationModel = requires(const M& m, std::size_t k, const Vector& theta, Vector& g, Matrix& h) {
  { m.period_count() } -> std::convertible_to<std::size_t>;
  { m.signal_dim() } -> std::convertible_to<Eigen::Index>;
  { m.period_loglik(k, theta) } -> std::convertible_to<double>;
  { m.period_derivatives(k, theta, g, h) } -> std::convertible_to<double>;
};

/// theta_k = offset_k + Z x_k with x_k an AR(1) state.
struct SignalStateModel {
  std::vector<Vector> offset;
  Matrix loading;
  Matrix ar;
  Matrix innovation_cov;
  Vector initial_mean;
  Matrix initial_cov;

  std::size_t period_count() const { return offset.size(); }
  Eigen::Index state_dim() const { return ar.rows(); }
  Vector signal(std::size_t k, const Vector& x) const { return offset[k] + loading * x; }

  /// Modelled-layout signal map of a family; u may be empty (no observed factors).
  static SignalStateModel from(const ModelFamily& family, const ModelParameters& psi, const ObservedFactors& u,
                               std::size_t periods) {
    validate_parameters(psi);
    SignalDesign design = modelled_design(family, psi);
    SignalStateModel m;
    const bool use_u = design.observed.cols() > 0 && u.period_count() > 0;
    if (design.observed.cols() > 0 && u.period_count() != 0 && u.period_count() != periods)
      throw DimensionError("observed factors must cover every period");
    m.offset.reserve(periods);
    for (std::size_t k = 0; k < periods; ++k) {
      if (use_u) {
        if (u.u[k].size() != design.observed.cols()) throw DimensionError("observed factor dimension mismatch");
        m.offset.push_back(design.offset + design.observed * u.u[k]);
      } else {
        m.offset.push_back(design.offset);
      }
    }
    m.loading = design.loading;
    m.ar = psi.ar;
    m.innovation_cov = psi.innovation_cov;
    m.initial_mean = psi.initial_mean;
    m.initial_cov = psi.initial_cov;
    return m;
  }
};

/// Gaussian observation of the signal, y_k ~ N(theta_k, H). The Laplace
/// approximation is exact for it, which makes it the reference model in tests.
class GaussianSignalObservation {
 public:
  GaussianSignalObservation(std::vector<Vector> y, const Matrix& cov) : y_(std::move(y)), cov_(cov), llt_(cov) {
    if (llt_.info() != Eigen::Success) throw DomainError("observation covariance must be positive definite");
    precision_ = llt_.solve(Matrix::Identity(cov.rows(), cov.cols()));
    const Matrix& l = llt_.matrixL();
    log_norm_ = -0.5 * static_cast<double>(cov.rows()) * std::log(2.0 * std::numbers::pi) -
                l.diagonal().array().log().sum();
  }

  std::size_t period_count() const { return y_.size(); }
  Eigen::Index signal_dim() const { return cov_.rows(); }
  const std::vector<Vector>& observations() const { return y_; }
  const Matrix& covariance() const { return cov_; }

  double period_loglik(std::size_t k, const Vector& theta) const {
    Vector r = y_[k] - theta;
    return log_norm_ - 0.5 * r.dot(llt_.solve(r));
  }

  double period_derivatives(std::size_t k, const Vector& theta, Vector& grad, Matrix& hess) const {
    Vector r = y_[k] - theta;
    grad = precision_ * r;
    hess = -precision_;
    return log_norm_ - 0.5 * r.dot(grad);
  }

 private:
  std::vector<Vector> y_;
  Matrix cov_;
  Eigen::LLT<Matrix> llt_;
  Matrix precision_;
  double log_norm_ = 0.0;
};

struct LaplaceOptions {
  double tol = 1e-8;  // sup-norm of the theta step
  int max_iter = 100;
  double grad_tol = 1e-6;
};

/// Auxiliary linear-Gaussian model at a signal path, with the pieces of the
/// Laplace constant.
struct AuxiliaryModel {
  LinearGaussianSSM ssm;
  std::vector<std::vector<Eigen::Index>> active;
  std::vector<Vector> pseudo_obs;  // full modelled layout; inactive entries carry theta
  std::vector<Vector> gradient;
  std::vector<Matrix> hessian;
  std::vector<double> obs_loglik;  // log p(M_k | theta_k)
  double log_constant = 0.0;       // log C
};

namespace detail {

inline Vector take(const Vector& v, const std::vector<Eigen::Index>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

inline Matrix take_rows(const Matrix& m, const std::vector<Eigen::Index>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  return out;
}

inline Matrix take_block(const Matrix& m, const std::vector<Eigen::Index>& idx) {
  const auto p = static_cast<Eigen::Index>(idx.size());
  Matrix out(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) out(i, j) = m(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  return out;
}

/// Log prior density of a latent path and its gradient.
class LatentPrior {
 public:
  explicit LatentPrior(const SignalStateModel& sm) : sm_(sm) {
    Matrix p1 = symmetrize(sm.ar * sm.initial_cov * sm.ar.transpose() + sm.innovation_cov);
    first_.compute(p1);
    innov_.compute(sm.innovation_cov);
    ok_ = first_.info() == Eigen::Success && innov_.info() == Eigen::Success &&
          Matrix(first_.matrixL()).diagonal().minCoeff() > 1e-10 &&
          Matrix(innov_.matrixL()).diagonal().minCoeff() > 1e-10;
    if (ok_) {
      const double log2pi = std::log(2.0 * std::numbers::pi);
      const double s = static_cast<double>(sm.state_dim());
      first_norm_ = -0.5 * s * log2pi - Matrix(first_.matrixL()).diagonal().array().log().sum();
      innov_norm_ = -0.5 * s * log2pi - Matrix(innov_.matrixL()).diagonal().array().log().sum();
    }
  }

  bool available() const { return ok_; }

  double logdensity(const std::vector<Vector>& x) const {
    double v = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      Vector r = residual(x, k);
      v += (k == 0) ? first_norm_ - 0.5 * r.dot(first_.solve(r)) : innov_norm_ - 0.5 * r.dot(innov_.solve(r));
    }
    return v;
  }

  std::vector<Vector> gradient(const std::vector<Vector>& x) const {
    const std::size_t n = x.size();
    std::vector<Vector> g(n);
    std::vector<Vector> w(n);  // precision-weighted residuals
    for (std::size_t k = 0; k < n; ++k) {
      Vector r = residual(x, k);
      w[k] = (k == 0) ? first_.solve(r) : innov_.solve(r);
    }
    for (std::size_t k = 0; k < n; ++k) {
      g[k] = -w[k];
      if (k + 1 < n) g[k] += sm_.ar.transpose() * w[k + 1];
    }
    return g;
  }

 private:
  Vector residual(const std::vector<Vector>& x, std::size_t k) const {
    return k == 0 ? Vector(x[0] - sm_.ar * sm_.initial_mean) : Vector(x[k] - sm_.ar * x[k - 1]);
  }

  const SignalStateModel& sm_;
  Eigen::LLT<Matrix> first_;
  Eigen::LLT<Matrix> innov_;
  bool ok_ = false;
  double first_norm_ = 0.0;
  double innov_norm_ = 0.0;
};

template <SignalObservationModel M>
double path_loglik(const M& model, const SignalStateModel& sm, const std::vector<Vector>& x) {
  double v = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) v += model.period_loglik(k, sm.signal(k, x[k]));
  return v;
}

inline std::vector<Vector> prior_mean_path(const SignalStateModel& sm) {
  std::vector<Vector> x;
  x.reserve(sm.period_count());
  Vector prev = sm.initial_mean;
  for (std::size_t k = 0; k < sm.period_count(); ++k) {
    prev = sm.ar * prev;
    x.push_back(prev);
  }
  return x;
}

}  // namespace detail

/// Builds the auxiliary model at the signal path theta (modelled layout).
template <SignalObservationModel M>
AuxiliaryModel build_auxiliary(const M& model, const SignalStateModel& sm, const std::vector<Vector>& theta) {
  const std::size_t n = model.period_count();
  if (sm.period_count() != n || theta.size() != n) throw DimensionError("signal path and data lengths differ");
  const Eigen::Index p = model.signal_dim();
  if (sm.loading.rows() != p) throw DimensionError("signal map and observation model disagree on the signal size");
  const double log2pi = std::log(2.0 * std::numbers::pi);

  AuxiliaryModel aux;
  LinearGaussianSSM& ssm = aux.ssm;
  ssm.a0 = sm.initial_mean;
  ssm.P0 = sm.initial_cov;
  ssm.transition.assign(n, sm.ar);
  ssm.state_cov.assign(n, sm.innovation_cov);
  ssm.y.resize(n);
  ssm.offset.resize(n);
  ssm.design.resize(n);
  ssm.obs_cov.resize(n);
  aux.active.resize(n);
  aux.pseudo_obs.resize(n);
  aux.gradient.resize(n);
  aux.hessian.resize(n);
  aux.obs_loglik.resize(n);

  for (std::size_t k = 0; k < n; ++k) {
    const double ll = model.period_derivatives(k, theta[k], aux.gradient[k], aux.hessian[k]);
    if (!std::isfinite(ll)) throw StepRejectionError(k, "observation log-likelihood is not finite");
    aux.obs_loglik[k] = ll;
    const Vector& g = aux.gradient[k];
    const Matrix& h = aux.hessian[k];
    std::vector<Eigen::Index>& act = aux.active[k];
    for (Eigen::Index j = 0; j < p; ++j)
      if (h(j, j) != 0.0) act.push_back(j);
    aux.pseudo_obs[k] = theta[k];
    aux.log_constant += ll;
    if (act.empty()) {
      ssm.y[k] = Vector();
      ssm.offset[k] = Vector();
      ssm.design[k] = Matrix(0, sm.state_dim());
      ssm.obs_cov[k] = Matrix(0, 0);
      continue;
    }
    Matrix neg = -detail::take_block(h, act);
    Eigen::LLT<Matrix> llt(neg);
    if (llt.info() != Eigen::Success) throw StepRejectionError(k, "Hessian block is not negative definite");
    const Matrix& l = llt.matrixL();
    if (!(l.diagonal().minCoeff() > 1e-12 * l.diagonal().maxCoeff()))
      throw StepRejectionError(k, "Hessian block is numerically singular");
    Vector ga = detail::take(g, act);
    Vector step = llt.solve(ga);  // -H^{-1} D
    Vector ta = detail::take(theta[k], act);
    Vector y = ta + step;
    for (std::size_t i = 0; i < act.size(); ++i) aux.pseudo_obs[k](act[i]) = y(static_cast<Eigen::Index>(i));
    const auto pa = static_cast<double>(act.size());
    aux.log_constant += 0.5 * pa * log2pi - l.diagonal().array().log().sum() + 0.5 * ga.dot(step);
    ssm.y[k] = std::move(y);
    ssm.offset[k] = detail::take(sm.offset[k], act);
    ssm.design[k] = detail::take_rows(sm.loading, act);
    ssm.obs_cov[k] = symmetrize(llt.solve(Matrix::Identity(neg.rows(), neg.cols())));
  }
  return aux;
}

struct ModeResult {
  SignalPath theta_mode;
  std::vector<Vector> latent;  // smoothed x at the mode
  int iterations = 0;          // Newton updates applied before the stopping test held
  double final_step_norm = 0.0;
  double grad_norm = 0.0;  // sup-norm of the posterior gradient in x; NaN if the prior is singular
};

template <SignalObservationModel M>
ModeResult estimate_mode(const M& model, const SignalStateModel& sm, const LaplaceOptions& opt = {},
                         const std::vector<Vector>* warm_start = nullptr) {
  if (!(opt.tol > 0.0)) throw DomainError("mode tolerance must be positive");
  const std::size_t n = model.period_count();
  if (sm.period_count() != n) throw DimensionError("signal map and data lengths differ");
  detail::LatentPrior prior(sm);

  std::vector<Vector> x =
      (warm_start && warm_start->size() == n) ? *warm_start : detail::prior_mean_path(sm);
  std::vector<Vector> theta(n);
  for (std::size_t k = 0; k < n; ++k) theta[k] = sm.signal(k, x[k]);

  ModeResult res;
  double objective = prior.available() ? detail::path_loglik(model, sm, x) + prior.logdensity(x) : 0.0;
  for (int it = 0;; ++it) {
    AuxiliaryModel aux = build_auxiliary(model, sm, theta);
    FilterOutput filt = kalman_filter(aux.ssm);
    SmootherOutput smooth = kalman_smoother(aux.ssm, filt);
    std::vector<Vector> x_new = std::move(smooth.mean);

    if (prior.available()) {
      // step halving on the exact log posterior
      double lambda = 1.0;
      std::vector<Vector> trial = x_new;
      double value = detail::path_loglik(model, sm, trial) + prior.logdensity(trial);
      int halvings = 0;
      while (!(value >= objective - 1e-10 * (1.0 + std::abs(objective)))) {
        if (++halvings > 40) {
          throw NonConvergenceError("mode search: no ascent along the Newton direction", theta);
        }
        lambda *= 0.5;
        for (std::size_t k = 0; k < n; ++k) trial[k] = x[k] + lambda * (x_new[k] - x[k]);
        value = detail::path_loglik(model, sm, trial) + prior.logdensity(trial);
      }
      x_new = std::move(trial);
      objective = value;
    }

    double step = 0.0;
    std::vector<Vector> theta_new(n);
    for (std::size_t k = 0; k < n; ++k) {
      theta_new[k] = sm.signal(k, x_new[k]);
      if (theta_new[k].size() > 0) step = std::max(step, (theta_new[k] - theta[k]).cwiseAbs().maxCoeff());
    }
    theta = std::move(theta_new);
    x = std::move(x_new);
    res.final_step_norm = step;
    if (step <= opt.tol) {
      res.iterations = it;
      break;
    }
    if (it + 1 >= opt.max_iter) {
      throw NonConvergenceError(
          "mode search did not converge within " + std::to_string(opt.max_iter) + " iterations", theta);
    }
  }

  if (prior.available()) {
    std::vector<Vector> g = prior.gradient(x);
    Vector dg;
    Matrix dh;
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      model.period_derivatives(k, theta[k], dg, dh);
      g[k] += sm.loading.transpose() * dg;
      if (g[k].size() > 0) norm = std::max(norm, g[k].cwiseAbs().maxCoeff());
    }
    res.grad_norm = norm;
  } else {
    res.grad_norm = std::numeric_limits<double>::quiet_NaN();
  }
  res.theta_mode.theta = std::move(theta);
  res.latent = std::move(x);
  return res;
}

struct LaplaceLikelihood {
  double loglik = 0.0;
  double logC = 0.0;
  double kalman_loglik = 0.0;
  LinearGaussianSSM aux_ssm;
  std::vector<Vector> pseudo_obs;
  std::vector<std::vector<Eigen::Index>> active;
  FilterOutput filter;  // auxiliary model filter pass at the mode
  ModeResult mode;
};

template <SignalObservationModel M>
LaplaceLikelihood laplace_loglik(const M& model, const SignalStateModel& sm, const LaplaceOptions& opt = {},
                                 const std::vector<Vector>* warm_start = nullptr) {
  LaplaceLikelihood out;
  out.mode = estimate_mode(model, sm, opt, warm_start);
  AuxiliaryModel aux = build_auxiliary(model, sm, out.mode.theta_mode.theta);
  out.filter = kalman_filter(aux.ssm);
  out.kalman_loglik = out.filter.loglik;
  out.logC = aux.log_constant;
  out.loglik = out.logC + out.kalman_loglik;
  out.aux_ssm = std::move(aux.ssm);
  out.pseudo_obs = std::move(aux.pseudo_obs);
  out.active = std::move(aux.active);
  return out;
}

// ---------------------------------------------------------------------------
// Family-level entry points.

inline ModeResult estimate_mode(const ModelFamily& family, const MigrationSeries& series, const ModelParameters& psi,
                                const ObservedFactors& u, const LaplaceOptions& opt = {}) {
  MultinomialObservation obs(family, series, psi.levels);
  return estimate_mode(obs, SignalStateModel::from(family, psi, u, series.period_count()), opt);
}

inline LaplaceLikelihood laplace_loglik(const ModelFamily& family, const MigrationSeries& series,
                                        const ModelParameters& psi, const ObservedFactors& u,
                                        const LaplaceOptions& opt = {}) {
  MultinomialObservation obs(family, series, psi.levels);
  return laplace_loglik(obs, SignalStateModel::from(family, psi, u, series.period_count()), opt);
}

// ---------------------------------------------------------------------------
// Free parameters under moment matching: levels follow from the long-run
// averages and the loadings, leaving (a, k) for one-factor families and
// (a_d, a_p, k_d, k_p, rho) for the two-factor probit.

struct ParameterBox {
  std::vector<std::string> names;
  Vector lower;
  Vector upper;
};

inline ParameterBox default_parameter_box(const ModelFamily& family) {
  ParameterBox box;
  switch (family.kind) {
    case FamilyKind::DefaultOnlyProbit:
    case FamilyKind::PerformingProbit:
      box.names = {"a", "k"};
      box.lower = Vector::Constant(2, 0.01);
      box.upper = (Vector(2) << 0.99, 2.0).finished();
      break;
    case FamilyKind::TwoFactorProbit:
      box.names = {"a_d", "a_p", "k_d", "k_p", "rho"};
      box.lower = (Vector(5) << 0.01, 0.01, 0.01, 0.01, -0.95).finished();
      box.upper = (Vector(5) << 0.99, 0.99, 2.0, 2.0, 0.95).finished();
      break;
    case FamilyKind::MultiFactorLogistic:
      throw DomainError("the moment-matched parameterization covers the probit families only");
  }
  return box;
}

inline ModelParameters parameters_from_free(const ModelFamily& family, const LongRunAverages& avg, const Vector& z) {
  switch (family.kind) {
    case FamilyKind::DefaultOnlyProbit: {
      Matrix levels = moment_matched_levels(family, avg, z(1), z(1));
      return default_only_parameters(levels.col(family.ratings - 1), z(1), z(0));
    }
    case FamilyKind::PerformingProbit:
      return performing_parameters(moment_matched_levels(family, avg, z(1), z(1)), z(1), z(0));
    case FamilyKind::TwoFactorProbit:
      return two_factor_parameters(moment_matched_levels(family, avg, z(2), z(3)), z(2), z(3), z(0), z(1), z(4));
    case FamilyKind::MultiFactorLogistic: break;
  }
  throw DomainError("the moment-matched parameterization covers the probit families only");
}

inline Vector free_from_parameters(const ModelFamily& family, const ModelParameters& psi) {
  switch (family.kind) {
    case FamilyKind::DefaultOnlyProbit:
    case FamilyKind::PerformingProbit: return (Vector(2) << psi.ar(0, 0), psi.loadings(0, 0)).finished();
    case FamilyKind::TwoFactorProbit:
      return (Vector(5) << psi.ar(0, 0), psi.ar(1, 1), psi.loadings(0, 0), psi.loadings(1, 1), psi.rho).finished();
    case FamilyKind::MultiFactorLogistic: break;
  }
  throw DomainError("the moment-matched parameterization covers the probit families only");
}

struct MLEOptions {
  LaplaceOptions laplace;
  NelderMeadOptions simplex{0.1, 1e-7, 1e-4, 1500};
  /// Extra starting points beyond psi0; empty means the two fixed defaults.
  std::vector<Vector> extra_starts;
};

struct MLEResult {
  ModelParameters psi_hat;
  std::vector<std::string> names;
  Vector estimate;
  LatentPath latent_estimates;
  double loglik_at_opt = -kInf;
  int evaluations = 0;
  bool converged = false;
};

inline std::vector<Vector> default_extra_starts(const ModelFamily& family) {
  if (family.kind == FamilyKind::TwoFactorProbit)
    return {(Vector(5) << 0.4, 0.4, 0.5, 0.5, 0.0).finished(), (Vector(5) << 0.85, 0.85, 0.15, 0.15, 0.5).finished()};
  return {(Vector(2) << 0.4, 0.5).finished(), (Vector(2) << 0.85, 0.15).finished()};
}

inline std::string describe_free(const ParameterBox& box, const Vector& z) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < z.size(); ++i) os << (i ? ", " : "") << box.names[static_cast<std::size_t>(i)] << "=" << z(i);
  os << ")";
  return os.str();
}

/// Maximizes the Laplace log-likelihood over the free parameters in `box`,
/// starting from psi0 and two fixed points.
inline MLEResult mle_laplace(const ModelFamily& family, const MigrationSeries& series, const ObservedFactors& u,
                             const ModelParameters& psi0, const ParameterBox& box, const MLEOptions& opt = {}) {
  const LongRunAverages avg = long_run_averages(series);
  const Vector z0 = free_from_parameters(family, psi0);
  if (z0.size() != box.lower.size()) throw DimensionError("bounds do not match the family's free parameters");
  if ((z0.array() < box.lower.array()).any() || (z0.array() > box.upper.array()).any())
    throw DomainError("psi0 lies outside the bounds");

  std::vector<Vector> warm;
  auto objective = [&](const Vector& z) -> double {
    try {
      ModelParameters psi = parameters_from_free(family, avg, z);
      MultinomialObservation obs(family, series, psi.levels);
      SignalStateModel sm = SignalStateModel::from(family, psi, u, series.period_count());
      LaplaceLikelihood ll = laplace_loglik(obs, sm, opt.laplace, warm.empty() ? nullptr : &warm);
      warm = ll.mode.latent;
      return -ll.loglik;
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError(std::string(e.what()) + " at " + describe_free(box, z), e.last_iterate());
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " at " + describe_free(box, z));
    }
  };

  std::vector<Vector> starts{z0};
  const std::vector<Vector> extra = opt.extra_starts.empty() ? default_extra_starts(family) : opt.extra_starts;
  for (const Vector& s : extra) starts.push_back(clamp_to_box(s, box.lower, box.upper));

  OptimizeResult best;
  int total = 0;
  for (const Vector& s : starts) {
    warm.clear();
    OptimizeResult r = nelder_mead_minimize(objective, s, box.lower, box.upper, opt.simplex);
    total += r.evaluations;
    if (best.x.size() == 0 || r.value < best.value) best = r;
  }

  MLEResult res;
  res.names = box.names;
  res.estimate = best.x;
  res.evaluations = total;
  res.converged = best.converged;
  res.psi_hat = parameters_from_free(family, avg, best.x);
  MultinomialObservation obs(family, series, res.psi_hat.levels);
  SignalStateModel sm = SignalStateModel::from(family, res.psi_hat, u, series.period_count());
  LaplaceLikelihood ll = laplace_loglik(obs, sm, opt.laplace);
  res.loglik_at_opt = ll.loglik;
  res.latent_estimates.x0 = res.psi_hat.initial_mean;
  res.latent_estimates.x = ll.mode.latent;
  if (!best.converged) throw NonConvergenceError("simplex search did not converge at " + describe_free(box, best.x),
                              ll.mode.theta_mode.theta);
  return res;
}

inline MLEResult mle_laplace(const ModelFamily& family, const MigrationSeries& series, const ObservedFactors& u,
                             const ModelParameters& psi0, const MLEOptions& opt = {}) {
  return mle_laplace(family, series, u, psi0, default_parameter_box(family), opt);
}

}  // namespace transcal
