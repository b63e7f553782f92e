#pragma once

// Derivative-free minimization on the unit box [0, 1]^d.
//
// Plain Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2)
// with every trial point projected back into the box. Callers map their
// physical parameter bounds onto the unit box themselves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace gainswitch::nm {

struct Options {
  std::size_t max_evals = 2000;
  double initial_step = 0.1;
  double x_tol = 1e-12;  // simplex diameter in box units
  double f_tol = 1e-15;  // relative spread of vertex values
};

struct Result {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  std::size_t evals = 0;
  bool converged = false;
};

template <class F>
Result minimize(F&& f, std::vector<double> x0, const Options& opt = {}) {
  const std::size_t d = x0.size();
  Result res;
  auto clamp01 = [](std::vector<double>& x) {
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  };
  auto eval = [&](const std::vector<double>& x) {
    ++res.evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };

  clamp01(x0);
  if (d == 0) {
    res.x = x0;
    res.f = eval(x0);
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> simplex(d + 1, x0);
  std::vector<double> fv(d + 1);
  auto build = [&](const std::vector<double>& base, double step) {
    simplex.assign(d + 1, base);
    for (std::size_t i = 0; i < d; ++i) {
      auto& v = simplex[i + 1];
      v[i] += (v[i] + step <= 1.0) ? step : -step;
      clamp01(v);
    }
    for (std::size_t i = 0; i <= d; ++i) fv[i] = eval(simplex[i]);
  };
  build(x0, opt.initial_step);

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), xr(d), xe(d), xc(d);
  int restarts = 0;

  while (res.evals < opt.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return fv[a] < fv[b] || (fv[a] == fv[b] && a < b);
    });
    const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

    double diam = 0.0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        diam = std::max(diam, std::abs(simplex[i][j] - simplex[best][j]));
    const double spread = fv[worst] - fv[best];
    if (diam <= opt.x_tol || spread <= opt.f_tol * (std::abs(fv[best]) + 1e-300)) {
      // One restart around the incumbent guards against a collapsed simplex.
      if (restarts++ < 1 && res.evals + d + 1 < opt.max_evals) {
        const auto base = simplex[best];
        build(base, std::max(opt.initial_step * 0.1, 100.0 * opt.x_tol));
        continue;
      }
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j] / static_cast<double>(d);
    }
    for (std::size_t j = 0; j < d; ++j) xr[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
    clamp01(xr);
    const double fr = eval(xr);

    if (fr < fv[best]) {
      for (std::size_t j = 0; j < d; ++j) xe[j] = centroid[j] + 2.0 * (xr[j] - centroid[j]);
      clamp01(xe);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    for (std::size_t j = 0; j < d; ++j)
      xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j])
                      : centroid[j] + 0.5 * (simplex[worst][j] - centroid[j]);
    const double fc = eval(xc);
    if (fc < std::min(fr, fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < d; ++j)
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      fv[i] = eval(simplex[i]);
    }
  }

  const auto it = std::min_element(fv.begin(), fv.end());
  res.x = simplex[static_cast<std::size_t>(it - fv.begin())];
  res.f = *it;
  return res;
}

}  // namespace gainswitch::nm
