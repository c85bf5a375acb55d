#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace transcal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class StationarityError : public Error {
 public:
  using Error::Error;
};

/// Innovation covariance S_k of a Kalman update could not be factorized.
class ConditioningError : public Error {
 public:
  ConditioningError(std::size_t period, const std::string& what)
      : Error(what + " (period " + std::to_string(period + 1) + ")"), period_(period) {}
  std::size_t period() const noexcept { return period_; }

 private:
  std::size_t period_;
};

/// Newton iteration ran out of iterations; carries the last signal iterate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<Vector> last_iterate)
      : Error(what), last_(std::move(last_iterate)) {}
  const std::vector<Vector>& last_iterate() const noexcept { return last_; }

 private:
  std::vector<Vector> last_;
};

/// A per-period Hessian block was not negative definite.
class StepRejectionError : public Error {
 public:
  StepRejectionError(std::size_t period, const std::string& what)
      : Error(what + " (period " + std::to_string(period + 1) + ")"), period_(period) {}
  std::size_t period() const noexcept { return period_; }

 private:
  std::size_t period_;
};

/// Every particle weight vanished at some period.
class WeightCollapseError : public Error {
 public:
  explicit WeightCollapseError(std::size_t period)
      : Error("particle weights collapsed at period " + std::to_string(period + 1)), period_(period) {}
  std::size_t period() const noexcept { return period_; }

 private:
  std::size_t period_;
};

/// A kernel or covariance matrix stayed indefinite after jitter escalation.
class IllConditionedError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Symmetric square root V diag(sqrt(max(lambda, 0))) for PSD matrices.
inline Matrix psd_sqrt(const Matrix& m) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace transcal
