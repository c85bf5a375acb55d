#pragma once

// Box-constrained Nelder-Mead. Trial points are projected onto the box, which
// keeps the simplex feasible without a penalty term.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "transcal/common.hpp"

namespace transcal {

struct NelderMeadOptions {
  double initial_step = 0.1;  // fraction of each box width
  double f_tol = 1e-8;        // spread of simplex values
  double x_tol = 1e-6;        // simplex diameter (sup-norm)
  int max_evaluations = 2000;
};

struct OptimizeResult {
  Vector x;
  double value = kInf;
  int evaluations = 0;
  bool converged = false;
};

inline Vector clamp_to_box(const Vector& x, const Vector& lower, const Vector& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

/// Minimizes f over [lower, upper]. Non-finite objective values are treated
/// as +inf so failed evaluations are simply avoided.
inline OptimizeResult nelder_mead_minimize(const std::function<double(const Vector&)>& f, const Vector& start,
                                           const Vector& lower, const Vector& upper,
                                           const NelderMeadOptions& opt = {}) {
  const Eigen::Index dim = start.size();
  if (lower.size() != dim || upper.size() != dim) throw DimensionError("bounds must match the start point");
  OptimizeResult res;
  auto eval = [&](const Vector& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };

  std::vector<Vector> simplex;
  std::vector<double> values;
  Vector x0 = clamp_to_box(start, lower, upper);
  simplex.push_back(x0);
  values.push_back(eval(x0));
  for (Eigen::Index i = 0; i < dim; ++i) {
    Vector x = x0;
    const double width = upper(i) - lower(i);
    double step = opt.initial_step * (std::isfinite(width) ? width : std::max(1.0, std::abs(x0(i))));
    if (x(i) + step > upper(i)) step = -step;
    x(i) += step;
    x = clamp_to_box(x, lower, upper);
    simplex.push_back(x);
    values.push_back(eval(x));
  }

  std::vector<std::size_t> order(simplex.size());
  while (res.evaluations < opt.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<Vector> s2;
      std::vector<double> v2;
      for (auto i : order) {
        s2.push_back(simplex[i]);
        v2.push_back(values[i]);
      }
      simplex.swap(s2);
      values.swap(v2);
    }
    double diameter = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      diameter = std::max(diameter, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
    const double spread = values.back() - values.front();
    if (diameter <= opt.x_tol || (std::isfinite(spread) && spread <= opt.f_tol && diameter <= 1e3 * opt.x_tol)) {
      res.converged = true;
      break;
    }

    const std::size_t worst = simplex.size() - 1;
    Vector centroid = Vector::Zero(dim);
    for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(worst);

    Vector xr = clamp_to_box(centroid + (centroid - simplex[worst]), lower, upper);
    const double fr = eval(xr);
    if (fr < values[0]) {
      Vector xe = clamp_to_box(centroid + 2.0 * (centroid - simplex[worst]), lower, upper);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[worst - 1]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    Vector xc = outside ? Vector(centroid + 0.5 * (xr - centroid)) : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
      values[i] = eval(simplex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  res.x = simplex[best];
  res.value = values[best];
  return res;
}

/// Runs the simplex search from each start and keeps the best.
inline OptimizeResult nelder_mead_multistart(const std::function<double(const Vector&)>& f,
                                             const std::vector<Vector>& starts, const Vector& lower,
                                             const Vector& upper, const NelderMeadOptions& opt = {}) {
  OptimizeResult best;
  int total = 0;
  for (const Vector& s : starts) {
    OptimizeResult r = nelder_mead_minimize(f, s, lower, upper, opt);
    total += r.evaluations;
    if (r.value < best.value || best.x.size() == 0) best = r;
  }
  best.evaluations = total;
  return best;
}

}  // namespace transcal
