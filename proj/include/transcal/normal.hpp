#pragma once

// Standard normal helpers. Tail-safe forms are used wherever the probit
// likelihoods need ratios of density to distribution function.

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

#include "transcal/common.hpp"

namespace transcal::normal {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double log_pdf(double x) { return -kLogSqrt2Pi - 0.5 * x * x; }

inline double cdf(double x) {
  if (x == kInf) return 1.0;
  if (x == -kInf) return 0.0;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

/// Upper tail 1 - cdf(x) without cancellation.
inline double ccdf(double x) { return cdf(-x); }

inline double log_cdf(double x) {
  if (x > -30.0) return std::log(cdf(x));
  // asymptotic expansion of the Mills ratio in the far lower tail
  const double z = -x;
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return log_pdf(x) - std::log(z) + std::log(series);
}

/// phi(x) / Phi(x), stable for very negative x.
inline double mills_lower(double x) {
  if (x > -30.0) return pdf(x) / cdf(x);
  return std::exp(log_pdf(x) - log_cdf(x));
}

inline double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    throw DomainError("normal quantile requires p in [0,1]");
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace transcal::normal
