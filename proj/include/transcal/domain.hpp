#pragma once

// Value types shared by every module: rating schemes, migration counts,
// model parameters and the latent / signal / observed-factor paths.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "transcal/common.hpp"

namespace transcal {

/// Ordered rating labels; the last label is the absorbing default state.
class RatingScheme {
 public:
  explicit RatingScheme(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw DomainError("a rating scheme needs at least two ratings");
  }

  /// Labels P1..P{R-1} followed by D.
  static RatingScheme with_count(int ratings) {
    if (ratings < 2) throw DomainError("a rating scheme needs at least two ratings");
    std::vector<std::string> labels;
    for (int i = 1; i < ratings; ++i) labels.push_back("P" + std::to_string(i));
    labels.emplace_back("D");
    return RatingScheme(std::move(labels));
  }

  int rating_count() const { return static_cast<int>(labels_.size()); }
  int performing_count() const { return rating_count() - 1; }
  int default_index() const { return rating_count() - 1; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Index of a label, or -1 if unknown.
  int index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
  }

 private:
  std::vector<std::string> labels_;
};

/// Observed migration counts m_{ij,k}: one (R-1) x R matrix per period.
/// Row totals N_{i,k} are stored alongside so that files carrying inconsistent
/// totals can be represented and reported by validate_series.
struct MigrationSeries {
  int ratings = 0;
  std::vector<CountMatrix> counts;
  std::vector<CountMatrix> row_totals;  // (R-1) x 1 per period

  static MigrationSeries from_counts(int ratings, std::vector<CountMatrix> counts) {
    MigrationSeries s;
    s.ratings = ratings;
    s.counts = std::move(counts);
    s.row_totals.reserve(s.counts.size());
    for (const auto& c : s.counts) s.row_totals.push_back(c.rowwise().sum());
    return s;
  }

  std::size_t period_count() const { return counts.size(); }
  int performing_count() const { return ratings - 1; }
  std::int64_t total(std::size_t k, int i) const { return row_totals[k](i, 0); }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_series(const MigrationSeries& series, const RatingScheme& scheme) {
  ValidationReport report;
  const int r = scheme.rating_count();
  if (series.ratings != r) {
    report.violations.push_back("dimension mismatch: series has " + std::to_string(series.ratings) +
                                " ratings, scheme has " + std::to_string(r));
    return report;
  }
  if (series.row_totals.size() != series.counts.size()) {
    report.violations.push_back("dimension mismatch: row totals missing for some periods");
    return report;
  }
  for (std::size_t k = 0; k < series.counts.size(); ++k) {
    const CountMatrix& c = series.counts[k];
    if (c.rows() != r - 1 || c.cols() != r) {
      report.violations.push_back("dimension mismatch at period " + std::to_string(k + 1));
      continue;
    }
    for (int i = 0; i < r - 1; ++i) {
      for (int j = 0; j < r; ++j) {
        if (c(i, j) < 0) {
          report.violations.push_back("negative count at (" + std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + "," + std::to_string(k + 1) + ")");
        }
      }
      const CountMatrix& totals = series.row_totals[k];
      if (totals.rows() != r - 1) {
        report.violations.push_back("dimension mismatch in row totals at period " + std::to_string(k + 1));
        break;
      }
      if (c.row(i).sum() != totals(i, 0)) {
        report.violations.push_back("row-total mismatch at (" + std::to_string(i + 1) + "," +
                                    std::to_string(k + 1) + ")");
      }
    }
  }
  return report;
}

/// psi: levels d, loadings K and L, AR matrix A, innovation covariance Q,
/// innovation correlation rho and the initial law (a0, P0) of x_0.
/// The meaning of `levels`, `loadings` and `observed_loadings` depends on the
/// model family (see models.hpp).
struct ModelParameters {
  Matrix levels;             // (R-1) x R
  Matrix loadings;           // family-specific, columns = latent dimension s
  Matrix observed_loadings;  // rows match loadings, columns = observed dimension l
  Matrix ar;                 // A, s x s
  Matrix innovation_cov;     // Q, s x s
  double rho = 0.0;
  Vector initial_mean;  // a0
  Matrix initial_cov;   // P0

  Eigen::Index latent_dim() const { return ar.rows(); }
  Eigen::Index observed_dim() const { return observed_loadings.cols(); }
};

inline double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Q = D Corr(rho) D with D = diag(sqrt(1 - A_mm^2)): unit stationary
/// variance for every component of a diagonal AR(1). For s > 2 the
/// correlation matrix is equicorrelated.
inline Matrix stationary_innovation_cov(const Matrix& a, double rho = 0.0) {
  if (a.rows() != a.cols()) throw DimensionError("AR matrix must be square");
  const Eigen::Index s = a.rows();
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < s; ++j)
      if (i != j && a(i, j) != 0.0) throw DomainError("stationary_innovation_cov expects a diagonal AR matrix");
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("innovation correlation must lie in (-1, 1)");
  Vector scale(s);
  for (Eigen::Index m = 0; m < s; ++m) {
    const double am = a(m, m);
    if (!(std::abs(am) < 1.0)) throw StationarityError("AR coefficient outside (-1, 1)");
    scale(m) = std::sqrt(1.0 - am * am);
  }
  Matrix corr = Matrix::Constant(s, s, rho);
  corr.diagonal().setOnes();
  return scale.asDiagonal() * corr * scale.asDiagonal();
}

/// Solves Sigma = A Sigma A' + Q (stationary covariance of the AR(1) state).
inline Matrix stationary_covariance(const Matrix& a, const Matrix& q) {
  const Eigen::Index s = a.rows();
  if (spectral_radius(a) >= 1.0) throw StationarityError("AR matrix is not stationary");
  Matrix kron(s * s, s * s);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < s; ++j) kron.block(i * s, j * s, s, s) = a(i, j) * a;
  Matrix lhs = Matrix::Identity(s * s, s * s) - kron;
  // column-major vec: vec(A S A') = (A kron A) vec(S)
  Vector vq = Eigen::Map<const Vector>(q.data(), s * s);
  Vector vs = lhs.partialPivLu().solve(vq);
  Matrix sigma = Eigen::Map<Matrix>(vs.data(), s, s);
  return symmetrize(sigma);
}

/// Throws when psi violates stationarity, covariance or correlation invariants.
inline void validate_parameters(const ModelParameters& psi) {
  const Eigen::Index s = psi.ar.rows();
  if (psi.ar.cols() != s || psi.innovation_cov.rows() != s || psi.innovation_cov.cols() != s)
    throw DimensionError("A and Q must be s x s");
  if (psi.initial_mean.size() != s || psi.initial_cov.rows() != s || psi.initial_cov.cols() != s)
    throw DimensionError("initial law must match the latent dimension");
  if (psi.loadings.cols() != s) throw DimensionError("loadings must have one column per latent factor");
  if (psi.observed_loadings.size() != 0 && psi.observed_loadings.rows() != psi.loadings.rows())
    throw DimensionError("observed loadings must align with latent loadings");
  if (spectral_radius(psi.ar) >= 1.0) throw StationarityError("spectral radius of A must be < 1");
  if ((psi.innovation_cov - psi.innovation_cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("Q must be symmetric");
  if (s > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(psi.innovation_cov);
    if (es.eigenvalues().minCoeff() < -1e-12) throw DomainError("Q must be positive semi-definite");
  }
  if (!(psi.rho > -1.0 && psi.rho < 1.0)) throw DomainError("rho must lie in (-1, 1)");
}

/// theta_{.,k}: one vector per period in the family's signal layout.
struct SignalPath {
  std::vector<Vector> theta;
  std::size_t period_count() const { return theta.size(); }
};

/// x_k per period; eta_k optional (empty when not recorded); x0 optional.
struct LatentPath {
  Vector x0;
  std::vector<Vector> x;
  std::vector<Vector> eta;

  std::size_t period_count() const { return x.size(); }

  /// x_k = A x_{k-1} + eta_k for every stored innovation.
  bool consistent_with(const Matrix& a, double tol = 1e-12) const {
    if (eta.empty()) return true;
    if (eta.size() != x.size() || x0.size() == 0) return false;
    Vector prev = x0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if ((x[k] - (a * prev + eta[k])).cwiseAbs().maxCoeff() > tol) return false;
      prev = x[k];
    }
    return true;
  }
};

/// u_k per period; an l = 0 vector per period when no observed factors are used.
struct ObservedFactors {
  std::vector<Vector> u;

  static ObservedFactors zeros(std::size_t periods, Eigen::Index dim = 0) {
    ObservedFactors f;
    f.u.assign(periods, Vector::Zero(dim));
    return f;
  }
  std::size_t period_count() const { return u.size(); }
  Eigen::Index dim() const { return u.empty() ? 0 : u.front().size(); }
};

}  // namespace transcal
