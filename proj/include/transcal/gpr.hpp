#pragma once

// Gaussian-process regression with a squared-exponential (ARD) kernel plus
// white noise. Targets are centred before fitting. Inputs on a Cartesian grid
// can be fitted through the eigen-decompositions of the per-axis kernel
// matrices, since the kernel matrix is then a Kronecker product.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "transcal/common.hpp"
#include "transcal/laplace.hpp"
#include "transcal/optimize.hpp"
#include "transcal/parallel.hpp"
#include "transcal/particle.hpp"

namespace transcal {

struct KernelSpec {
  double sigma_f = 1.0;
  Vector lengthscales;
  double sigma_noise = 1e-3;

  void validate(Eigen::Index dim) const {
    if (lengthscales.size() != dim) throw DimensionError("one lengthscale per input dimension is required");
    if (!(sigma_f > 0.0) || !(sigma_noise > 0.0) || (lengthscales.array() <= 0.0).any())
      throw DomainError("kernel hyperparameters must be strictly positive");
  }
};

inline double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
  if (x.size() != spec.lengthscales.size() || y.size() != spec.lengthscales.size())
    throw DimensionError("kernel input dimension mismatch");
  const double r2 = ((x - y).array() / spec.lengthscales.array()).square().sum();
  return spec.sigma_f * spec.sigma_f * std::exp(-0.5 * r2);
}

/// Kernel matrix between the rows of a and the rows of b (no noise term).
inline Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  Matrix k(a.rows(), b.rows());
  const double s2 = spec.sigma_f * spec.sigma_f;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const double r2 = ((a.row(i) - b.row(j)).array() / spec.lengthscales.transpose().array()).square().sum();
      k(i, j) = s2 * std::exp(-0.5 * r2);
    }
  return k;
}

/// Points of a d-dimensional Cartesian grid, flattened lexicographically with
/// the last axis varying fastest.
struct CartesianGrid {
  std::vector<Vector> axes;

  explicit CartesianGrid(std::vector<Vector> ax = {}) : axes(std::move(ax)) { validate(); }

  static CartesianGrid uniform(const Vector& lower, const Vector& upper, int points_per_axis) {
    std::vector<Vector> ax;
    for (Eigen::Index m = 0; m < lower.size(); ++m)
      ax.push_back(points_per_axis == 1 ? Vector::Constant(1, lower(m))
                                        : Vector(Vector::LinSpaced(points_per_axis, lower(m), upper(m))));
    return CartesianGrid(std::move(ax));
  }

  void validate() const {
    for (const auto& a : axes) {
      if (a.size() == 0) throw DimensionError("grid axes must be non-empty");
      for (Eigen::Index i = 1; i < a.size(); ++i)
        if (!(a(i) > a(i - 1))) throw DomainError("grid axis values must be strictly increasing");
    }
  }

  Eigen::Index dim() const { return static_cast<Eigen::Index>(axes.size()); }

  std::size_t size() const {
    std::size_t n = axes.empty() ? 0 : 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(a.size());
    return n;
  }

  /// Zero-based multi-index -> flat index.
  std::size_t flatten(const std::vector<std::size_t>& idx) const {
    if (idx.size() != axes.size()) throw DimensionError("multi-index has the wrong length");
    std::size_t flat = 0;
    for (std::size_t m = 0; m < axes.size(); ++m) {
      if (idx[m] >= static_cast<std::size_t>(axes[m].size())) throw DimensionError("grid index out of range");
      flat = flat * static_cast<std::size_t>(axes[m].size()) + idx[m];
    }
    return flat;
  }

  std::vector<std::size_t> unflatten(std::size_t flat) const {
    std::vector<std::size_t> idx(axes.size());
    for (std::size_t m = axes.size(); m-- > 0;) {
      const auto n = static_cast<std::size_t>(axes[m].size());
      idx[m] = flat % n;
      flat /= n;
    }
    return idx;
  }

  Vector point(std::size_t flat) const {
    auto idx = unflatten(flat);
    Vector p(dim());
    for (std::size_t m = 0; m < axes.size(); ++m) p(static_cast<Eigen::Index>(m)) = axes[m](static_cast<Eigen::Index>(idx[m]));
    return p;
  }

  /// All points as rows, in flattened order.
  Matrix points() const {
    Matrix x(static_cast<Eigen::Index>(size()), dim());
    for (std::size_t i = 0; i < size(); ++i) x.row(static_cast<Eigen::Index>(i)) = point(i).transpose();
    return x;
  }
};

struct TrainedGPR {
  Matrix inputs;  // rows
  Vector targets;
  double target_mean = 0.0;
  KernelSpec kernel;
  double log_marginal = 0.0;
  Vector alpha;  // (K + sigma_n^2 I)^{-1} (y - mean)

  // dense factorization
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;

  // Kronecker factorization
  bool gridded = false;
  CartesianGrid grid;
  std::vector<Matrix> axis_vectors;  // eigenvectors of the unit-amplitude axis kernels
  Vector spectrum;                   // sigma_f^2 prod(lambda_m) + sigma_n^2, flattened order
};

struct GPRPrediction {
  Vector mean;
  Vector variance;  // latent function variance (noise excluded)
};

namespace detail {

/// Applies mats[m] along axis m of a tensor stored with the last axis fastest.
inline Vector kron_apply(const std::vector<Matrix>& mats, const std::vector<Eigen::Index>& dims, Vector v,
                         bool transpose) {
  Eigen::Index inner = 1;
  for (std::size_t m = mats.size(); m-- > 0;) {
    const Eigen::Index nm = dims[m];
    const Eigen::Index outer = v.size() / (nm * inner);
    const Matrix b = transpose ? Matrix(mats[m].transpose()) : mats[m];
    Vector out(v.size());
    Vector slice(nm);
    for (Eigen::Index o = 0; o < outer; ++o)
      for (Eigen::Index i = 0; i < inner; ++i) {
        for (Eigen::Index j = 0; j < nm; ++j) slice(j) = v(o * nm * inner + j * inner + i);
        Vector r = b * slice;
        for (Eigen::Index j = 0; j < nm; ++j) out(o * nm * inner + j * inner + i) = r(j);
      }
    v = std::move(out);
    inner *= nm;
  }
  return v;
}

inline Vector kron_vectors(const std::vector<Vector>& parts) {
  Vector out = Vector::Ones(1);
  for (const auto& p : parts) {
    Vector next(out.size() * p.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * p.size(), p.size()) = out(i) * p;
    out = std::move(next);
  }
  return out;
}

inline Matrix axis_kernel(const Vector& a, const Vector& b, double lengthscale) {
  Matrix k(a.size(), b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      const double r = (a(i) - b(j)) / lengthscale;
      k(i, j) = std::exp(-0.5 * r * r);
    }
  return k;
}

inline double centred_mean(const Vector& y) { return y.size() ? y.mean() : 0.0; }

/// Dense fit at fixed hyperparameters; escalates diagonal jitter up to 1e-6.
inline void dense_factorize(TrainedGPR& model) {
  const Eigen::Index n = model.inputs.rows();
  Matrix k = kernel_matrix(model.kernel, model.inputs, model.inputs);
  k.diagonal().array() += model.kernel.sigma_noise * model.kernel.sigma_noise;
  double jitter = 0.0;
  for (;;) {
    Matrix kj = k;
    if (jitter > 0.0) kj.diagonal().array() += jitter;
    model.llt.compute(kj);
    bool ok = model.llt.info() == Eigen::Success;
    if (ok) {
      const Matrix& l = model.llt.matrixL();
      ok = l.diagonal().minCoeff() > 1e-12 * std::max(1.0, l.diagonal().maxCoeff());
    }
    if (ok) break;
    jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0;
    if (jitter > 1e-6 * (1.0 + 1e-9)) throw IllConditionedError("kernel matrix is ill-conditioned after jitter 1e-6");
  }
  model.jitter = jitter;
  Vector yc = model.targets.array() - model.target_mean;
  model.alpha = model.llt.solve(yc);
  const Matrix& l = model.llt.matrixL();
  model.log_marginal = -0.5 * yc.dot(model.alpha) - l.diagonal().array().log().sum() -
                       0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

inline void grid_factorize(TrainedGPR& model) {
  const CartesianGrid& g = model.grid;
  std::vector<Vector> eig;
  model.axis_vectors.clear();
  std::vector<Eigen::Index> dims;
  for (Eigen::Index m = 0; m < g.dim(); ++m) {
    const Vector& ax = g.axes[static_cast<std::size_t>(m)];
    Eigen::SelfAdjointEigenSolver<Matrix> es(axis_kernel(ax, ax, model.kernel.lengthscales(m)));
    model.axis_vectors.push_back(es.eigenvectors());
    eig.push_back(es.eigenvalues().cwiseMax(0.0));
    dims.push_back(ax.size());
  }
  const double s2 = model.kernel.sigma_f * model.kernel.sigma_f;
  const double n2 = model.kernel.sigma_noise * model.kernel.sigma_noise;
  model.spectrum = (s2 * kron_vectors(eig)).array() + n2;
  Vector yc = model.targets.array() - model.target_mean;
  Vector rotated = kron_apply(model.axis_vectors, dims, yc, true);
  Vector scaled = rotated.array() / model.spectrum.array();
  model.alpha = kron_apply(model.axis_vectors, dims, scaled, false);
  model.log_marginal = -0.5 * rotated.dot(scaled) - 0.5 * model.spectrum.array().log().sum() -
                       0.5 * static_cast<double>(yc.size()) * std::log(2.0 * std::numbers::pi);
}

inline Vector pack(const KernelSpec& k) {
  Vector t(k.lengthscales.size() + 2);
  t(0) = std::log(k.sigma_f);
  t.segment(1, k.lengthscales.size()) = k.lengthscales.array().log();
  t(t.size() - 1) = std::log(k.sigma_noise);
  return t;
}

inline KernelSpec unpack(const Vector& t) {
  KernelSpec k;
  k.sigma_f = std::exp(t(0));
  k.lengthscales = t.segment(1, t.size() - 2).array().exp();
  k.sigma_noise = std::exp(t(t.size() - 1));
  return k;
}

/// Log-space box for the hyperparameters, scaled to the data.
inline void hyper_box(const Matrix& x, const Vector& y, Vector& lower, Vector& upper) {
  const Eigen::Index d = x.cols();
  const double sd = y.size() > 1 ? std::sqrt((y.array() - y.mean()).square().mean()) : 1.0;
  const double scale = sd > 0.0 ? sd : 1.0;
  lower.resize(d + 2);
  upper.resize(d + 2);
  lower(0) = std::log(1e-3 * scale);
  upper(0) = std::log(1e3 * scale);
  for (Eigen::Index m = 0; m < d; ++m) {
    double range = x.rows() > 1 ? x.col(m).maxCoeff() - x.col(m).minCoeff() : 0.0;
    if (!(range > 0.0)) range = 1.0;
    lower(1 + m) = std::log(1e-2 * range);
    upper(1 + m) = std::log(1e2 * range);
  }
  lower(d + 1) = std::log(1e-3);  // noise variance >= 1e-6
  upper(d + 1) = std::log(std::max(1e3 * scale, 1.0));
}

template <class Factorize>
TrainedGPR optimize_hyper(TrainedGPR model, Factorize&& factorize) {
  Vector lower, upper;
  hyper_box(model.inputs, model.targets, lower, upper);
  auto objective = [&](const Vector& t) {
    TrainedGPR trial = model;
    trial.kernel = unpack(t);
    try {
      factorize(trial);
    } catch (const Error&) {
      return kInf;
    }
    return -trial.log_marginal;
  };
  std::vector<Vector> starts{clamp_to_box(pack(model.kernel), lower, upper)};
  {
    KernelSpec alt;
    const double sd = model.targets.size() > 1
                          ? std::sqrt((model.targets.array() - model.targets.mean()).square().mean())
                          : 1.0;
    alt.sigma_f = sd > 0.0 ? sd : 1.0;
    alt.lengthscales.resize(model.inputs.cols());
    for (Eigen::Index m = 0; m < model.inputs.cols(); ++m) {
      double range = model.inputs.rows() > 1 ? model.inputs.col(m).maxCoeff() - model.inputs.col(m).minCoeff() : 1.0;
      alt.lengthscales(m) = range > 0.0 ? range / 3.0 : 1.0;
    }
    alt.sigma_noise = std::max(1e-3, 0.01 * alt.sigma_f);
    starts.push_back(clamp_to_box(pack(alt), lower, upper));
  }
  NelderMeadOptions nm;
  nm.initial_step = 0.05;
  nm.x_tol = 1e-5;
  nm.f_tol = 1e-9;
  nm.max_evaluations = 4000;
  OptimizeResult best = nelder_mead_multistart(objective, starts, lower, upper, nm);
  model.kernel = unpack(best.x);
  factorize(model);
  return model;
}

}  // namespace detail

/// Marginal log-likelihood of centred targets, evaluated densely.
inline double gpr_log_marginal(const Matrix& x, const Vector& y, const KernelSpec& spec) {
  TrainedGPR m;
  m.inputs = x;
  m.targets = y;
  m.target_mean = detail::centred_mean(y);
  m.kernel = spec;
  detail::dense_factorize(m);
  return m.log_marginal;
}

inline TrainedGPR gpr_fit(const Matrix& x, const Vector& y, const KernelSpec& spec0, bool optimize) {
  if (x.rows() != y.size()) throw DimensionError("inputs and targets differ in length");
  if (x.rows() < 1) throw DomainError("at least one training point is required");
  spec0.validate(x.cols());
  TrainedGPR m;
  m.inputs = x;
  m.targets = y;
  m.target_mean = detail::centred_mean(y);
  m.kernel = spec0;
  if (optimize) return detail::optimize_hyper(std::move(m), detail::dense_factorize);
  detail::dense_factorize(m);
  return m;
}

/// Kronecker-structured fit; y in the grid's flattened order.
inline TrainedGPR grid_fit(const CartesianGrid& grid, const Vector& y, const KernelSpec& spec0, bool optimize = false) {
  grid.validate();
  if (grid.size() != static_cast<std::size_t>(y.size())) throw DimensionError("targets must cover every grid point");
  spec0.validate(grid.dim());
  TrainedGPR m;
  m.gridded = true;
  m.grid = grid;
  m.inputs = grid.points();
  m.targets = y;
  m.target_mean = detail::centred_mean(y);
  m.kernel = spec0;
  if (optimize) return detail::optimize_hyper(std::move(m), detail::grid_factorize);
  detail::grid_factorize(m);
  return m;
}

/// Predictive mean and latent variance at the rows of xs.
inline GPRPrediction gpr_predict(const TrainedGPR& model, const Matrix& xs) {
  if (xs.cols() != model.inputs.cols()) throw DimensionError("query dimension mismatch");
  GPRPrediction out;
  const Eigen::Index q = xs.rows();
  out.mean.resize(q);
  out.variance.resize(q);
  const double s2 = model.kernel.sigma_f * model.kernel.sigma_f;
  if (model.gridded) {
    const CartesianGrid& g = model.grid;
    for (Eigen::Index i = 0; i < q; ++i) {
      std::vector<Vector> parts, rotated;
      for (Eigen::Index m = 0; m < g.dim(); ++m) {
        const Vector& ax = g.axes[static_cast<std::size_t>(m)];
        Vector km = detail::axis_kernel(ax, Vector::Constant(1, xs(i, m)), model.kernel.lengthscales(m)).col(0);
        rotated.push_back(model.axis_vectors[static_cast<std::size_t>(m)].transpose() * km);
        parts.push_back(std::move(km));
      }
      Vector kstar = s2 * detail::kron_vectors(parts);
      Vector vk = s2 * detail::kron_vectors(rotated);
      out.mean(i) = model.target_mean + kstar.dot(model.alpha);
      const double v = s2 - (vk.array().square() / model.spectrum.array()).sum();
      out.variance(i) = std::max(v, 0.0);
    }
    return out;
  }
  Matrix ks = kernel_matrix(model.kernel, xs, model.inputs);  // q x n
  out.mean = (ks * model.alpha).array() + model.target_mean;
  Matrix v = model.llt.matrixL().solve(ks.transpose());
  for (Eigen::Index i = 0; i < q; ++i) out.variance(i) = std::max(s2 - v.col(i).squaredNorm(), 0.0);
  return out;
}

/// Predictive mean over a lattice of a gridded model: rows follow axis 0,
/// columns axis 1. Two-dimensional grids only.
inline Matrix gpr_mean_lattice(const TrainedGPR& model, const Vector& axis0, const Vector& axis1) {
  if (!model.gridded || model.grid.dim() != 2) throw DomainError("lattice prediction needs a two-dimensional grid fit");
  const CartesianGrid& g = model.grid;
  const double s2 = model.kernel.sigma_f * model.kernel.sigma_f;
  Matrix k0 = detail::axis_kernel(axis0, g.axes[0], model.kernel.lengthscales(0));
  Matrix k1 = detail::axis_kernel(axis1, g.axes[1], model.kernel.lengthscales(1));
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> alpha(
      model.alpha.data(), g.axes[0].size(), g.axes[1].size());
  Matrix out = s2 * (k0 * alpha * k1.transpose());
  out.array() += model.target_mean;
  return out;
}

/// Prediction along one axis with the other coordinates held fixed.
inline GPRPrediction gpr_cross_section(const TrainedGPR& model, const Vector& fixed_point, Eigen::Index axis,
                                       const Vector& values) {
  Matrix xs(values.size(), model.inputs.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    xs.row(i) = fixed_point.transpose();
    xs(i, axis) = values(i);
  }
  return gpr_predict(model, xs);
}

// ---------------------------------------------------------------------------
// Grid-based maximum likelihood from particle-filter log-likelihoods.

struct PFGridSpec {
  CartesianGrid grid = CartesianGrid::uniform(Vector::Constant(2, 0.1), Vector::Constant(2, 0.9), 20);  // (a, k)
  std::size_t particles = 1000;
  int lattice = 400;  // points per axis of the argmax lattice
  KernelSpec kernel0{1.0, Vector::Constant(2, 0.2), 1.0};
  bool optimize_kernel = true;
  double min_success = 0.9;
  int workers = 1;
  PFOptions pf;
};

struct LikelihoodSurface {
  CartesianGrid grid;
  Vector loglik;                      // NaN where the particle filter failed
  std::vector<std::string> failures;  // empty string on success
  TrainedGPR gpr;
  Vector fitted;  // GPR mean at the grid points

  std::size_t failed_count() const {
    return static_cast<std::size_t>(std::count_if(failures.begin(), failures.end(),
                                                  [](const std::string& f) { return !f.empty(); }));
  }
};

struct PFGPRResult {
  ModelParameters psi_hat;
  Vector estimate;  // (a, k)
  double fitted_max = -kInf;
  LikelihoodSurface surface;
};

/// Evaluates the importance-sampling particle filter over the (a, k) grid of a
/// one-factor family (levels moment-matched per point), fits a GPR to the
/// noisy log-likelihoods and maximizes its mean. Point i uses the seed
/// derive_seed(seed, i).
inline PFGPRResult pf_gpr_mle(const ModelFamily& family, const MigrationSeries& series, const ObservedFactors& u,
                              const PFGridSpec& spec, std::uint64_t seed) {
  if (family.kind != FamilyKind::DefaultOnlyProbit && family.kind != FamilyKind::PerformingProbit)
    throw DomainError("grid calibration covers the one-factor probit families");
  if (spec.grid.dim() != 2) throw DimensionError("the calibration grid spans (a, k)");
  const ParameterBox box = default_parameter_box(family);
  for (Eigen::Index m = 0; m < 2; ++m) {
    const Vector& ax = spec.grid.axes[static_cast<std::size_t>(m)];
    if (ax.minCoeff() < box.lower(m) || ax.maxCoeff() > box.upper(m))
      throw DomainError("grid leaves the admissible parameter box");
  }
  const LongRunAverages avg = long_run_averages(series);
  const std::size_t points = spec.grid.size();

  PFGPRResult res;
  LikelihoodSurface& surf = res.surface;
  surf.grid = spec.grid;
  surf.loglik = Vector::Constant(static_cast<Eigen::Index>(points), std::numeric_limits<double>::quiet_NaN());
  surf.failures.assign(points, std::string());
  parallel_for(points, resolve_workers(spec.workers), [&](std::size_t i) {
    try {
      ModelParameters psi = parameters_from_free(family, avg, spec.grid.point(i));
      std::mt19937_64 rng(derive_seed(seed, i));
      PFLikelihood pf = pf_importance(family, series, psi, u, spec.particles, rng, spec.pf);
      surf.loglik(static_cast<Eigen::Index>(i)) = pf.loglik;
    } catch (const Error& e) {
      surf.failures[i] = e.what();
    }
  });

  const std::size_t failed = surf.failed_count();
  if (static_cast<double>(points - failed) < spec.min_success * static_cast<double>(points))
    throw Error("particle filter failed at " + std::to_string(failed) + " of " + std::to_string(points) +
                " grid points");
  if (failed == 0) {
    surf.gpr = grid_fit(spec.grid, surf.loglik, spec.kernel0, spec.optimize_kernel);
  } else {
    Matrix x(static_cast<Eigen::Index>(points - failed), 2);
    Vector y(x.rows());
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < points; ++i) {
      if (!surf.failures[i].empty()) continue;
      x.row(r) = spec.grid.point(i).transpose();
      y(r++) = surf.loglik(static_cast<Eigen::Index>(i));
    }
    surf.gpr = gpr_fit(x, y, spec.kernel0, spec.optimize_kernel);
  }
  surf.fitted = gpr_predict(surf.gpr, spec.grid.points()).mean;

  // lattice argmax, then simplex polish on the GPR mean
  const Vector lo(Vector{{spec.grid.axes[0].minCoeff(), spec.grid.axes[1].minCoeff()}});
  const Vector hi(Vector{{spec.grid.axes[0].maxCoeff(), spec.grid.axes[1].maxCoeff()}});
  const int lat = std::max(spec.lattice, 2);
  Vector a0 = Vector::LinSpaced(lat, lo(0), hi(0));
  Vector a1 = Vector::LinSpaced(lat, lo(1), hi(1));
  Vector start(2);
  if (surf.gpr.gridded) {
    Matrix mean = gpr_mean_lattice(surf.gpr, a0, a1);
    Eigen::Index i0 = 0, i1 = 0;
    mean.maxCoeff(&i0, &i1);
    start << a0(i0), a1(i1);
  } else {
    double best = -kInf;
    Matrix row(lat, 2);
    row.col(1) = a1;
    for (int i = 0; i < lat; ++i) {
      row.col(0).setConstant(a0(i));
      Vector m = gpr_predict(surf.gpr, row).mean;
      Eigen::Index j = 0;
      const double v = m.maxCoeff(&j);
      if (v > best) {
        best = v;
        start << a0(i), a1(j);
      }
    }
  }
  auto negative_mean = [&](const Vector& z) { return -gpr_predict(surf.gpr, z.transpose()).mean(0); };
  NelderMeadOptions nm;
  nm.initial_step = 1.0 / lat;
  nm.x_tol = 1e-6;
  nm.f_tol = 1e-10;
  OptimizeResult polish = nelder_mead_minimize(negative_mean, start, lo, hi, nm);
  res.estimate = polish.value <= negative_mean(start) ? polish.x : start;
  res.fitted_max = -negative_mean(res.estimate);
  res.psi_hat = parameters_from_free(family, avg, res.estimate);
  return res;
}

/// `a,k,loglik,fitted_loglik`, one row per grid point in flattened order.
inline void write_surface(std::ostream& os, const LikelihoodSurface& surface) {
  os << "a,k,loglik,fitted_loglik\n";
  os.precision(12);
  for (std::size_t i = 0; i < surface.grid.size(); ++i) {
    Vector p = surface.grid.point(i);
    const double ll = surface.loglik(static_cast<Eigen::Index>(i));
    os << p(0) << ',' << p(1) << ',';
    if (std::isnan(ll)) os << "nan"; else os << ll;
    os << ',' << surface.fitted(static_cast<Eigen::Index>(i)) << '\n';
  }
}

}  // namespace transcal
