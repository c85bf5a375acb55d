#pragma once

// Response-model families mapping signals to transition probabilities.
//
// Signal layouts (per period):
//   DefaultOnlyProbit    theta_i = d_i + K x + L u, one per performing row; PD_i = Phi(theta_i)
//   TwoFactorProbit      (theta_D, theta_P) = K x + L u shared by all rows;
//                        levels d_{i,R} (default) and d_{i,2..R-1} (performing thresholds)
//   MultiFactorLogistic  theta_ij = d_ij + K_ij' x + L_ij' u for every cell; row softmax
//   PerformingProbit     theta_P shared by all rows; the "migration given no default"
//                        part of the two-factor model, used by stepwise calibration
//
// Levels are stored as an (R-1) x R matrix. For the probit families column
// R-1 holds the default level, columns 1..R-2 the performing thresholds and
// column 0 is the +infinity boundary (never read).
//
// The logistic likelihood only depends on contrasts theta_ij - theta_iR, so
// the Laplace and particle machinery work on the (R-1)(R-1) contrast signals
// ("modelled" layout). For the probit families both layouts coincide.

#include <cmath>
#include <string>
#include <vector>

#include "transcal/common.hpp"
#include "transcal/domain.hpp"
#include "transcal/normal.hpp"

namespace transcal {

enum class FamilyKind { DefaultOnlyProbit, TwoFactorProbit, MultiFactorLogistic, PerformingProbit };

inline std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::DefaultOnlyProbit: return "default-only-probit";
    case FamilyKind::TwoFactorProbit: return "two-factor-probit";
    case FamilyKind::MultiFactorLogistic: return "multi-factor-logistic";
    case FamilyKind::PerformingProbit: return "performing-probit";
  }
  return "unknown";
}

inline FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "default-only-probit" || name == "default-only") return FamilyKind::DefaultOnlyProbit;
  if (name == "two-factor-probit" || name == "two-factor") return FamilyKind::TwoFactorProbit;
  if (name == "multi-factor-logistic" || name == "logistic") return FamilyKind::MultiFactorLogistic;
  if (name == "performing-probit" || name == "performing") return FamilyKind::PerformingProbit;
  throw ConfigError("unknown model family '" + name + "'");
}

struct ModelFamily {
  FamilyKind kind = FamilyKind::DefaultOnlyProbit;
  int ratings = 2;
  int latent_dim = 1;  // s; fixed to 1 / 2 / 1 for the probit families

  static ModelFamily default_only(int ratings) { return {FamilyKind::DefaultOnlyProbit, ratings, 1}; }
  static ModelFamily two_factor(int ratings) { return {FamilyKind::TwoFactorProbit, ratings, 2}; }
  static ModelFamily logistic(int ratings, int factors) { return {FamilyKind::MultiFactorLogistic, ratings, factors}; }
  static ModelFamily performing(int ratings) { return {FamilyKind::PerformingProbit, ratings, 1}; }

  int performing_count() const { return ratings - 1; }

  /// Number of rows of K (and L) in ModelParameters.
  Eigen::Index loading_rows() const {
    switch (kind) {
      case FamilyKind::DefaultOnlyProbit: return 1;
      case FamilyKind::TwoFactorProbit: return 2;
      case FamilyKind::MultiFactorLogistic: return static_cast<Eigen::Index>(ratings - 1) * ratings;
      case FamilyKind::PerformingProbit: return 1;
    }
    return 0;
  }

  /// Signals per period in SignalPath layout.
  Eigen::Index signal_count() const {
    switch (kind) {
      case FamilyKind::DefaultOnlyProbit: return ratings - 1;
      case FamilyKind::TwoFactorProbit: return 2;
      case FamilyKind::MultiFactorLogistic: return static_cast<Eigen::Index>(ratings - 1) * ratings;
      case FamilyKind::PerformingProbit: return 1;
    }
    return 0;
  }

  /// Signals per period that the likelihood actually depends on.
  Eigen::Index modelled_count() const {
    if (kind == FamilyKind::MultiFactorLogistic) return static_cast<Eigen::Index>(ratings - 1) * (ratings - 1);
    return signal_count();
  }
};

/// Affine map theta_k = offset + loading x_k + observed u_k.
struct SignalDesign {
  Vector offset;
  Matrix loading;
  Matrix observed;

  Vector offset_at(const Vector& u) const {
    if (observed.cols() == 0 || u.size() == 0) return offset;
    return offset + observed * u;
  }
};

namespace detail {

inline void check_family_shapes(const ModelFamily& family, const ModelParameters& psi) {
  if (psi.levels.rows() != family.ratings - 1 || psi.levels.cols() != family.ratings)
    throw DimensionError("levels must be (R-1) x R");
  if (psi.loadings.rows() != family.loading_rows())
    throw DimensionError("loadings have " + std::to_string(psi.loadings.rows()) + " rows, family " +
                         to_string(family.kind) + " expects " + std::to_string(family.loading_rows()));
  if (psi.loadings.cols() != psi.ar.rows()) throw DimensionError("loadings must have s columns");
  if (psi.observed_loadings.size() != 0 && psi.observed_loadings.rows() != family.loading_rows())
    throw DimensionError("observed loadings must have the same rows as loadings");
}

inline Matrix observed_or_empty(const ModelParameters& psi, Eigen::Index rows) {
  if (psi.observed_loadings.size() == 0) return Matrix::Zero(rows, 0);
  return psi.observed_loadings;
}

}  // namespace detail

/// Design in SignalPath layout.
inline SignalDesign signal_design(const ModelFamily& family, const ModelParameters& psi) {
  detail::check_family_shapes(family, psi);
  const int rows = family.performing_count();
  const int r = family.ratings;
  SignalDesign design;
  Matrix obs = detail::observed_or_empty(psi, family.loading_rows());
  switch (family.kind) {
    case FamilyKind::DefaultOnlyProbit:
      design.offset = psi.levels.col(r - 1);
      design.loading = psi.loadings.row(0).replicate(rows, 1);
      design.observed = obs.row(0).replicate(rows, 1);
      break;
    case FamilyKind::TwoFactorProbit:
    case FamilyKind::PerformingProbit:
      design.offset = Vector::Zero(family.signal_count());
      design.loading = psi.loadings;
      design.observed = obs;
      break;
    case FamilyKind::MultiFactorLogistic: {
      design.offset.resize(static_cast<Eigen::Index>(rows) * r);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < r; ++j) design.offset(i * r + j) = psi.levels(i, j);
      design.loading = psi.loadings;
      design.observed = obs;
      break;
    }
  }
  return design;
}

/// Design in the modelled layout (logistic contrasts against the default column).
inline SignalDesign modelled_design(const ModelFamily& family, const ModelParameters& psi) {
  SignalDesign full = signal_design(family, psi);
  if (family.kind != FamilyKind::MultiFactorLogistic) return full;
  const int rows = family.performing_count();
  const int r = family.ratings;
  const Eigen::Index p = family.modelled_count();
  SignalDesign d;
  d.offset.resize(p);
  d.loading.resize(p, full.loading.cols());
  d.observed.resize(p, full.observed.cols());
  for (int i = 0; i < rows; ++i) {
    const Eigen::Index base = static_cast<Eigen::Index>(i) * r + (r - 1);
    for (int j = 0; j < r - 1; ++j) {
      const Eigen::Index out = static_cast<Eigen::Index>(i) * (r - 1) + j;
      const Eigen::Index in = static_cast<Eigen::Index>(i) * r + j;
      d.offset(out) = full.offset(in) - full.offset(base);
      d.loading.row(out) = full.loading.row(in) - full.loading.row(base);
      d.observed.row(out) = full.observed.row(in) - full.observed.row(base);
    }
  }
  return d;
}

inline SignalPath signal_from_factors(const ModelFamily& family, const ModelParameters& psi, const LatentPath& x,
                                      const ObservedFactors& u) {
  SignalDesign design = signal_design(family, psi);
  const bool use_u = design.observed.cols() > 0;
  if (use_u && u.period_count() != x.period_count())
    throw DimensionError("observed factors must cover every period");
  SignalPath path;
  path.theta.reserve(x.period_count());
  for (std::size_t k = 0; k < x.period_count(); ++k) {
    if (x.x[k].size() != design.loading.cols()) throw DimensionError("latent state dimension mismatch");
    Vector theta = design.offset + design.loading * x.x[k];
    if (use_u) {
      if (u.u[k].size() != design.observed.cols()) throw DimensionError("observed factor dimension mismatch");
      theta += design.observed * u.u[k];
    }
    path.theta.push_back(std::move(theta));
  }
  return path;
}

/// Probit levels for one row from long-run averages at theta = 0: performing
/// migration probabilities given no default and the default probability.
inline Vector probit_levels_from_averages(const Vector& performing_probs, double pd) {
  const Eigen::Index r = performing_probs.size() + 1;
  Vector levels(r);
  levels(0) = kInf;
  double tail = performing_probs.sum();
  for (Eigen::Index j = 1; j < r - 1; ++j) {
    tail -= performing_probs(j - 1);
    levels(j) = normal::quantile(tail);
  }
  levels(r - 1) = normal::quantile(pd);
  return levels;
}

namespace detail {

struct ScalarDerivatives {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

/// m log Phi(t) + (n - m) log(1 - Phi(t)) and derivatives in t.
inline ScalarDerivatives binomial_probit(double defaults, double trials, double t) {
  ScalarDerivatives out;
  const double survivors = trials - defaults;
  if (defaults > 0.0) {
    const double lam = normal::mills_lower(t);
    out.value += defaults * normal::log_cdf(t);
    out.first += defaults * lam;
    out.second -= defaults * lam * (t + lam);
  }
  if (survivors > 0.0) {
    const double lam = normal::mills_lower(-t);
    out.value += survivors * normal::log_cdf(-t);
    out.first -= survivors * lam;
    out.second -= survivors * lam * (lam - t);
  }
  return out;
}

inline double binomial_probit_value(double defaults, double trials, double t) {
  double v = 0.0;
  if (defaults > 0.0) v += defaults * normal::log_cdf(t);
  if (trials - defaults > 0.0) v += (trials - defaults) * normal::log_cdf(-t);
  return v;
}

/// Sum_j m_j log(Phi(c_j + t) - Phi(c_{j+1} + t)) over performing columns,
/// with c_1 = +inf and c_R = -inf. `thresholds` is the levels row (size R),
/// `counts` points at m_{i1..i,R-1}.
template <bool WithDerivatives>
inline ScalarDerivatives ordered_probit(const double* counts, const double* thresholds, int ratings, double t) {
  ScalarDerivatives out;
  const int cats = ratings - 1;
  for (int j = 0; j < cats; ++j) {
    const double m = counts[j];
    if (m <= 0.0) continue;
    const bool top = (j == 0);
    const bool bottom = (j == cats - 1);
    if (top && bottom) continue;  // single performing category: probability one
    const double a = top ? kInf : thresholds[j] + t;
    const double b = bottom ? -kInf : thresholds[j + 1] + t;
    if (top) {
      // P = 1 - Phi(b)
      out.value += m * normal::log_cdf(-b);
      if constexpr (WithDerivatives) {
        const double lam = normal::mills_lower(-b);
        out.first -= m * lam;
        out.second -= m * lam * (lam - b);
      }
    } else if (bottom) {
      // P = Phi(a)
      out.value += m * normal::log_cdf(a);
      if constexpr (WithDerivatives) {
        const double lam = normal::mills_lower(a);
        out.first += m * lam;
        out.second -= m * lam * (a + lam);
      }
    } else {
      const double p = (b > 0.0) ? normal::cdf(-b) - normal::cdf(-a) : normal::cdf(a) - normal::cdf(b);
      if (!(p > 0.0)) {
        out.value = -kInf;
        return out;
      }
      out.value += m * std::log(p);
      if constexpr (WithDerivatives) {
        const double pa = normal::pdf(a);
        const double pb = normal::pdf(b);
        const double d1 = (pa - pb) / p;
        const double d2 = (-a * pa + b * pb) / p;
        out.first += m * d1;
        out.second += m * (d2 - d1 * d1);
      }
    }
  }
  return out;
}

inline double log_sum_exp_with_zero(const double* x, int n) {
  double mx = 0.0;
  for (int j = 0; j < n; ++j) mx = std::max(mx, x[j]);
  double s = std::exp(-mx);
  for (int j = 0; j < n; ++j) s += std::exp(x[j] - mx);
  return mx + std::log(s);
}

}  // namespace detail

/// Transition probabilities for one row.
///   DefaultOnlyProbit: theta = (theta_i) -> (1 - PD, PD)
///   TwoFactorProbit:   theta = (theta_D, theta_P) -> R probabilities
///   MultiFactorLogistic: theta = R cell signals -> softmax
///   PerformingProbit:  theta = (theta_P) -> R-1 probabilities given no default
inline Vector transition_probs(const ModelFamily& family, const Vector& levels_row, const Vector& theta) {
  const int r = family.ratings;
  auto performing = [&](double tp) {
    if (levels_row.size() != r) throw DimensionError("levels row must have R entries");
    for (int j = 2; j < r - 1; ++j)
      if (!(levels_row(j) < levels_row(j - 1)))
        throw DomainError("performing thresholds must be strictly decreasing");
    Vector nd(r - 1);
    for (int j = 0; j < r - 1; ++j) {
      const double upper = (j == 0) ? 1.0 : normal::cdf(levels_row(j) + tp);
      const double lower = (j == r - 2) ? 0.0 : normal::cdf(levels_row(j + 1) + tp);
      double p = upper - lower;
      if (j > 0 && j < r - 2 && levels_row(j + 1) + tp > 0.0)
        p = normal::cdf(-(levels_row(j + 1) + tp)) - normal::cdf(-(levels_row(j) + tp));
      nd(j) = std::max(p, 0.0);
    }
    return nd;
  };
  switch (family.kind) {
    case FamilyKind::DefaultOnlyProbit: {
      if (theta.size() != 1) throw DimensionError("default-only rows take one signal");
      Vector t(2);
      t << normal::ccdf(theta(0)), normal::cdf(theta(0));
      return t;
    }
    case FamilyKind::TwoFactorProbit: {
      if (theta.size() != 2) throw DimensionError("two-factor rows take (theta_D, theta_P)");
      Vector nd = performing(theta(1));
      const double pd = normal::cdf(levels_row(r - 1) + theta(0));
      Vector t(r);
      t.head(r - 1) = (1.0 - pd) * nd;
      t(r - 1) = pd;
      return t;
    }
    case FamilyKind::PerformingProbit: {
      if (theta.size() != 1) throw DimensionError("performing rows take one signal");
      return performing(theta(0));
    }
    case FamilyKind::MultiFactorLogistic: {
      if (theta.size() != r) throw DimensionError("logistic rows take R signals");
      const double mx = theta.maxCoeff();
      Vector e = (theta.array() - mx).exp();
      return e / e.sum();
    }
  }
  return {};
}

/// Exact multinomial log-probability of a row of counts (size R) under the
/// probability row returned by transition_probs. Returns -inf when a
/// positive count meets a zero probability.
inline double row_loglik(const ModelFamily& family, const Eigen::Ref<const Eigen::VectorXd>& counts,
                         const Vector& probs) {
  const int r = family.ratings;
  if (counts.size() != r) throw DimensionError("count row must have R entries");
  auto multinomial = [](const Eigen::Ref<const Eigen::VectorXd>& m, const Vector& p) {
    double total = m.sum();
    double v = std::lgamma(total + 1.0);
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      v -= std::lgamma(m(j) + 1.0);
      if (m(j) > 0.0) {
        if (!(p(j) > 0.0)) return -kInf;
        v += m(j) * std::log(p(j));
      }
    }
    return v;
  };
  switch (family.kind) {
    case FamilyKind::DefaultOnlyProbit: {
      Vector m(2);
      m << counts.head(r - 1).sum(), counts(r - 1);
      return multinomial(m, probs);
    }
    case FamilyKind::PerformingProbit: return multinomial(counts.head(r - 1), probs);
    case FamilyKind::TwoFactorProbit:
    case FamilyKind::MultiFactorLogistic: return multinomial(counts, probs);
  }
  return -kInf;
}

/// Gradient and Hessian of log p(M_k | theta_k) per period. The Hessian is
/// block diagonal across periods; one dense block per period is stored.
struct SignalDerivatives {
  std::vector<double> loglik;
  std::vector<Vector> gradient;
  std::vector<Matrix> hessian;
};

/// Observation density p(M | theta) of a multinomial family on the modelled
/// signal layout. Counts are cached as doubles along with the combinatorial
/// constants, since the particle filters call period_loglik in tight loops.
class MultinomialObservation {
 public:
  MultinomialObservation(const ModelFamily& family, const MigrationSeries& series, const Matrix& levels)
      : family_(family), levels_(levels) {
    if (series.ratings != family.ratings) throw DimensionError("series and family disagree on R");
    if (levels.rows() != family.ratings - 1 || levels.cols() != family.ratings)
      throw DimensionError("levels must be (R-1) x R");
    const int rows = family.performing_count();
    const int r = family.ratings;
    counts_.reserve(series.period_count());
    constants_.reserve(series.period_count());
    for (std::size_t k = 0; k < series.period_count(); ++k) {
      const CountMatrix& c = series.counts[k];
      if (c.rows() != rows || c.cols() != r) throw DimensionError("count matrix has the wrong shape");
      Matrix m = c.cast<double>();
      double constant = 0.0;
      for (int i = 0; i < rows; ++i) {
        const double n = m.row(i).sum();
        switch (family.kind) {
          case FamilyKind::DefaultOnlyProbit:
            constant += std::lgamma(n + 1.0) - std::lgamma(m(i, r - 1) + 1.0) - std::lgamma(n - m(i, r - 1) + 1.0);
            break;
          case FamilyKind::PerformingProbit: {
            const double nd = n - m(i, r - 1);
            constant += std::lgamma(nd + 1.0);
            for (int j = 0; j < r - 1; ++j) constant -= std::lgamma(m(i, j) + 1.0);
            break;
          }
          case FamilyKind::TwoFactorProbit:
          case FamilyKind::MultiFactorLogistic:
            constant += std::lgamma(n + 1.0);
            for (int j = 0; j < r; ++j) constant -= std::lgamma(m(i, j) + 1.0);
            break;
        }
      }
      // row-major copy so per-row pointers are contiguous
      counts_.emplace_back(m);
      constants_.push_back(constant);
    }
  }

  const ModelFamily& family() const { return family_; }
  std::size_t period_count() const { return counts_.size(); }
  Eigen::Index signal_dim() const { return family_.modelled_count(); }

  double period_loglik(std::size_t k, const Vector& theta) const {
    return evaluate<false>(k, theta, nullptr, nullptr);
  }

  double period_derivatives(std::size_t k, const Vector& theta, Vector& grad, Matrix& hess) const {
    return evaluate<true>(k, theta, &grad, &hess);
  }

 private:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  template <bool WithDerivatives>
  double evaluate(std::size_t k, const Vector& theta, Vector* grad, Matrix* hess) const {
    const RowMatrix& m = counts_[k];
    const int rows = family_.performing_count();
    const int r = family_.ratings;
    const Eigen::Index p = family_.modelled_count();
    if (theta.size() != p) throw DimensionError("signal vector has the wrong length");
    if constexpr (WithDerivatives) {
      grad->setZero(p);
      hess->setZero(p, p);
    }
    double value = constants_[k];
    switch (family_.kind) {
      case FamilyKind::DefaultOnlyProbit:
        for (int i = 0; i < rows; ++i) {
          const double n = m.row(i).sum();
          if constexpr (WithDerivatives) {
            auto d = detail::binomial_probit(m(i, r - 1), n, theta(i));
            value += d.value;
            (*grad)(i) = d.first;
            (*hess)(i, i) = d.second;
          } else {
            value += detail::binomial_probit_value(m(i, r - 1), n, theta(i));
          }
        }
        break;
      case FamilyKind::TwoFactorProbit:
      case FamilyKind::PerformingProbit: {
        const bool with_default = family_.kind == FamilyKind::TwoFactorProbit;
        const double tp = with_default ? theta(1) : theta(0);
        for (int i = 0; i < rows; ++i) {
          const double* row = m.data() + static_cast<Eigen::Index>(i) * r;
          const double* lv = levels_.data() + static_cast<Eigen::Index>(i) * r;
          if (with_default) {
            const double n = m.row(i).sum();
            const double t = lv[r - 1] + theta(0);
            if constexpr (WithDerivatives) {
              auto d = detail::binomial_probit(row[r - 1], n, t);
              value += d.value;
              (*grad)(0) += d.first;
              (*hess)(0, 0) += d.second;
            } else {
              value += detail::binomial_probit_value(row[r - 1], n, t);
            }
          }
          auto d = detail::ordered_probit<WithDerivatives>(row, lv, r, tp);
          value += d.value;
          if constexpr (WithDerivatives) {
            const Eigen::Index idx = with_default ? 1 : 0;
            (*grad)(idx) += d.first;
            (*hess)(idx, idx) += d.second;
          }
        }
        break;
      }
      case FamilyKind::MultiFactorLogistic: {
        const int c = r - 1;
        std::vector<double> probs(static_cast<std::size_t>(c));
        for (int i = 0; i < rows; ++i) {
          const double* th = theta.data() + static_cast<Eigen::Index>(i) * c;
          const double n = m.row(i).sum();
          const double lse = detail::log_sum_exp_with_zero(th, c);
          for (int j = 0; j < c; ++j) value += m(i, j) * th[j];
          value -= n * lse;
          if constexpr (WithDerivatives) {
            for (int j = 0; j < c; ++j) probs[static_cast<std::size_t>(j)] = std::exp(th[j] - lse);
            const Eigen::Index base = static_cast<Eigen::Index>(i) * c;
            for (int j = 0; j < c; ++j) {
              const double pj = probs[static_cast<std::size_t>(j)];
              (*grad)(base + j) = m(i, j) - n * pj;
              for (int l = 0; l < c; ++l)
                (*hess)(base + j, base + l) = n * pj * probs[static_cast<std::size_t>(l)] - (j == l ? n * pj : 0.0);
            }
          }
        }
        break;
      }
    }
    return value;
  }

  ModelFamily family_;
  RowMatrix levels_;
  std::vector<RowMatrix> counts_;
  std::vector<double> constants_;
};

/// D-hat and H-hat of log p(M | theta) in SignalPath layout.
inline SignalDerivatives signal_grad_hess(const ModelFamily& family, const MigrationSeries& series,
                                          const SignalPath& theta, const ModelParameters& psi) {
  if (theta.period_count() != series.period_count()) throw DimensionError("signal path and series lengths differ");
  SignalDerivatives out;
  const std::size_t n = series.period_count();
  out.loglik.resize(n);
  out.gradient.resize(n);
  out.hessian.resize(n);
  if (family.kind != FamilyKind::MultiFactorLogistic) {
    MultinomialObservation obs(family, series, psi.levels);
    for (std::size_t k = 0; k < n; ++k)
      out.loglik[k] = obs.period_derivatives(k, theta.theta[k], out.gradient[k], out.hessian[k]);
    return out;
  }
  // full-cell logistic layout: grad = m - N T, hess = -N (diag T - T T')
  const int rows = family.performing_count();
  const int r = family.ratings;
  const Eigen::Index p = family.signal_count();
  for (std::size_t k = 0; k < n; ++k) {
    if (theta.theta[k].size() != p) throw DimensionError("signal vector has the wrong length");
    Vector g = Vector::Zero(p);
    Matrix h = Matrix::Zero(p, p);
    double value = 0.0;
    for (int i = 0; i < rows; ++i) {
      Vector th = theta.theta[k].segment(static_cast<Eigen::Index>(i) * r, r);
      Vector t = transition_probs(family, Vector(), th);
      Vector m = series.counts[k].row(i).cast<double>().transpose();
      value += row_loglik(family, m, t);
      const double nn = m.sum();
      const Eigen::Index base = static_cast<Eigen::Index>(i) * r;
      g.segment(base, r) = m - nn * t;
      h.block(base, base, r, r) = nn * (t * t.transpose());
      h.block(base, base, r, r).diagonal() -= nn * t;
    }
    out.loglik[k] = value;
    out.gradient[k] = std::move(g);
    out.hessian[k] = std::move(h);
  }
  return out;
}

inline double series_loglik(const ModelFamily& family, const MigrationSeries& series, const SignalPath& theta,
                            const ModelParameters& psi) {
  double total = 0.0;
  for (std::size_t k = 0; k < series.period_count(); ++k) {
    const int rows = family.performing_count();
    const int r = family.ratings;
    for (int i = 0; i < rows; ++i) {
      Vector th;
      switch (family.kind) {
        case FamilyKind::DefaultOnlyProbit: th = theta.theta[k].segment(i, 1); break;
        case FamilyKind::TwoFactorProbit:
        case FamilyKind::PerformingProbit: th = theta.theta[k]; break;
        case FamilyKind::MultiFactorLogistic: th = theta.theta[k].segment(static_cast<Eigen::Index>(i) * r, r); break;
      }
      Vector probs = transition_probs(family, psi.levels.row(i).transpose(), th);
      total += row_loglik(family, series.counts[k].row(i).cast<double>().transpose(), probs);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Parameter constructors under the unit-variance convention.

namespace detail {
inline Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline void fill_dynamics(ModelParameters& psi, const Matrix& a, double rho) {
  psi.ar = a;
  psi.rho = rho;
  psi.innovation_cov = stationary_innovation_cov(a, rho);
  psi.initial_mean = Vector::Zero(a.rows());
  psi.initial_cov = stationary_covariance(a, psi.innovation_cov);
}
}  // namespace detail

/// One-factor default-only probit; `pd_levels` holds d_i per performing row.
inline ModelParameters default_only_parameters(const Vector& pd_levels, double k, double a) {
  ModelParameters psi;
  const Eigen::Index rows = pd_levels.size();
  psi.levels = Matrix::Zero(rows, rows + 1);
  psi.levels.col(rows) = pd_levels;
  psi.loadings = Matrix::Constant(1, 1, k);
  psi.observed_loadings = Matrix::Zero(1, 0);
  detail::fill_dynamics(psi, Matrix::Constant(1, 1, a), 0.0);
  return psi;
}

inline ModelParameters two_factor_parameters(const Matrix& levels, double kd, double kp, double ad, double ap,
                                             double rho) {
  ModelParameters psi;
  psi.levels = levels;
  psi.loadings = detail::diag2(kd, kp);
  psi.observed_loadings = Matrix::Zero(2, 0);
  detail::fill_dynamics(psi, detail::diag2(ad, ap), rho);
  return psi;
}

inline ModelParameters performing_parameters(const Matrix& levels, double kp, double ap) {
  ModelParameters psi;
  psi.levels = levels;
  psi.loadings = Matrix::Constant(1, 1, kp);
  psi.observed_loadings = Matrix::Zero(1, 0);
  detail::fill_dynamics(psi, Matrix::Constant(1, 1, ap), 0.0);
  return psi;
}

/// Multi-factor logistic with diagonal A; `loadings` is (R-1)R x s.
inline ModelParameters logistic_parameters(const Matrix& levels, const Matrix& loadings, const Vector& ar_diag,
                                           double rho = 0.0) {
  ModelParameters psi;
  psi.levels = levels;
  psi.loadings = loadings;
  psi.observed_loadings = Matrix::Zero(loadings.rows(), 0);
  detail::fill_dynamics(psi, Matrix(ar_diag.asDiagonal()), rho);
  return psi;
}

}  // namespace transcal
