#pragma once

// Embedded Dormand-Prince 5(4) integrator with continuous (dense) output.
//
// Tableau, error weights and dense-output coefficients follow the DOPRI5
// code of Hairer & Wanner. The observer sees every accepted step as a
// DenseStep and may ask the integrator to stop inside it, which is how the
// laser simulation locates events and switches its drive off mid-run.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "gainswitch/errors.hpp"

namespace gainswitch::ode {

template <std::size_t Dim>
using State = std::array<double, Dim>;

struct Tolerances {
  double rtol = 1e-8;
  double atol = 1.0;
};

struct Options {
  Tolerances tol{};
  double h_init = 0.0;  // 0: pick automatically
  double h_max = std::numeric_limits<double>::infinity();
  double h_min_rel = 1e-14;  // floor relative to |t| (and to the span)
  std::size_t max_steps = 5'000'000;
};

template <std::size_t Dim>
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  State<Dim> y0{};
  State<Dim> y1{};
  // Hairer's rcont2..rcont5
  std::array<State<Dim>, 4> r{};

  double t1() const { return t0 + h; }

  State<Dim> operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State<Dim> y{};
    for (std::size_t i = 0; i < Dim; ++i) {
      y[i] = y0[i] + th * (r[0][i] + th1 * (r[1][i] + th * (r[2][i] + th1 * r[3][i])));
    }
    return y;
  }
};

template <std::size_t Dim>
struct Result {
  double t = 0.0;
  State<Dim> y{};
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  bool stopped_early = false;
};

namespace detail {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t Dim>
double error_norm(const State<Dim>& err, const State<Dim>& y0, const State<Dim>& y1,
                  const Tolerances& tol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < Dim; ++i) {
    const double sc = tol.atol + tol.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(Dim));
}

template <std::size_t Dim, class Rhs>
double initial_step(Rhs& f, double t0, const State<Dim>& y0, const State<Dim>& f0, double span,
                    const Tolerances& tol) {
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < Dim; ++i) {
    const double sk = tol.atol + tol.rtol * std::abs(y0[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 * span : 0.01 * std::sqrt(dny / dnf);
  h = std::min(h, span);
  State<Dim> y1{};
  for (std::size_t i = 0; i < Dim; ++i) y1[i] = y0[i] + h * f0[i];
  const State<Dim> f1 = f(t0 + h, y1);
  double der2 = 0.0;
  for (std::size_t i = 0; i < Dim; ++i) {
    const double sk = tol.atol + tol.rtol * std::abs(y0[i]);
    const double d = (f1[i] - f0[i]) / sk;
    der2 += d * d;
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(der2, std::sqrt(dnf));
  const double h1 =
      der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 5.0);
  return std::min({100.0 * h, h1, span});
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1.
///
/// `observer(step)` is called once per accepted step and returns an optional
/// stop time inside (step.t0, step.t1()]; when set, the run ends there with
/// the dense-output state.
template <std::size_t Dim, class Rhs, class Observer>
Result<Dim> integrate(Rhs&& f, State<Dim> y, double t0, double t1, const Options& opt,
                      Observer&& observer) {
  using namespace detail;
  Result<Dim> res;
  res.t = t0;
  res.y = y;
  const double span = t1 - t0;
  if (!(span > 0.0)) return res;

  double t = t0;
  State<Dim> k1 = f(t, y);
  double h = opt.h_init > 0.0 ? opt.h_init : initial_step<Dim>(f, t0, y, k1, span, opt.tol);
  h = std::min(h, opt.h_max);
  double err_old = 1e-4;
  bool last_rejected = false;

  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) throw IntegrationError("step budget exhausted", t);
    const double h_floor = opt.h_min_rel * std::max(std::abs(t), span);
    if (h < h_floor) throw IntegrationError("step size underflow", t);
    bool final_step = false;
    if (t + h >= t1 || t + 1.01 * h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    State<Dim> tmp{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y1{}, err{};
    for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = f(t + c2 * h, tmp);
    for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * h, tmp);
    for (std::size_t i = 0; i < Dim; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * h, tmp);
    for (std::size_t i = 0; i < Dim; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * h, tmp);
    for (std::size_t i = 0; i < Dim; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double t_new = final_step ? t1 : t + h;
    k6 = f(t + h, tmp);
    for (std::size_t i = 0; i < Dim; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = f(t_new, y1);
    for (std::size_t i = 0; i < Dim; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    bool finite = true;
    for (std::size_t i = 0; i < Dim; ++i) finite = finite && std::isfinite(y1[i]);
    const double en = finite ? error_norm<Dim>(err, y, y1, opt.tol) : 1e10;

    if (en <= 1.0) {
      DenseStep<Dim> step;
      step.t0 = t;
      step.h = h;
      step.y0 = y;
      step.y1 = y1;
      for (std::size_t i = 0; i < Dim; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        step.r[0][i] = ydiff;
        step.r[1][i] = bspl;
        step.r[2][i] = ydiff - h * k7[i] - bspl;
        step.r[3][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                            d7 * k7[i]);
      }
      ++res.accepted;
      const std::optional<double> stop = observer(static_cast<const DenseStep<Dim>&>(step));
      if (stop) {
        const double ts = std::clamp(*stop, t, t_new);
        res.t = ts;
        res.y = ts == t_new ? y1 : step(ts);
        res.stopped_early = true;
        return res;
      }
      // factor per Hairer's PI controller (beta = 0.04)
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5.0) * std::pow(err_old, 0.04);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      err_old = std::max(en, 1e-4);
      t = t_new;
      y = y1;
      k1 = k7;
      last_rejected = false;
      if (final_step) break;
      h = std::min(h * fac, opt.h_max);
    } else {
      ++res.rejected;
      const double fac = finite ? std::max(0.2, 0.9 * std::pow(en, -1.0 / 5.0)) : 0.1;
      h *= fac;
      last_rejected = true;
    }
  }
  res.t = t;
  res.y = y;
  return res;
}

template <std::size_t Dim, class Rhs>
Result<Dim> integrate(Rhs&& f, State<Dim> y, double t0, double t1, const Options& opt = {}) {
  return integrate<Dim>(std::forward<Rhs>(f), y, t0, t1, opt,
                        [](const DenseStep<Dim>&) { return std::optional<double>{}; });
}

/// Root of a continuous `g` on [a, b] given g(a) and g(b) of opposite sign
/// (or g(b) == 0). Illinois-modified regula falsi, falls back to bisection.
template <class G>
double find_root(G&& g, double a, double b, double ga, double gb, int max_iter = 200) {
  if (gb == 0.0) return b;
  if (ga == 0.0) return a;
  int side = 0;
  for (int it = 0; it < max_iter; ++it) {
    double c = (a * gb - b * ga) / (gb - ga);
    if (!(c > a && c < b)) c = 0.5 * (a + b);
    const double gc = g(c);
    if (gc == 0.0) return c;
    if ((gc > 0.0) == (gb > 0.0)) {
      b = c;
      gb = gc;
      if (side == -1) ga *= 0.5;
      side = -1;
    } else {
      a = c;
      ga = gc;
      if (side == 1) gb *= 0.5;
      side = 1;
    }
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)))
      break;
  }
  return 0.5 * (a + b);
}

}  // namespace gainswitch::ode
