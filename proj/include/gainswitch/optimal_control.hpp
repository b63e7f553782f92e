#pragma once

// Energy-optimal precharge current for gain switching.
//
// Below threshold the carrier density obeys x' = -a x + u/b with a = 1/tau_N
// and b = e V. Minimizing J = int_0^T u^2 dt subject to x(0) = 0 and
// x(T) = N_th gives x(t) = N_th sinh(a t)/sinh(a T) and the exponential
// current u(t) = a b N_th e^{a t} / sinh(a T).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gainswitch/errors.hpp"
#include "gainswitch/laser_model.hpp"
#include "gainswitch/pulse_metrics.hpp"
#include "gainswitch/random.hpp"

namespace gainswitch {

struct OptimalProfile {
  double A = 0.0;      // current prefactor, A
  double tau_N = 0.0;  // growth time constant, s
  double T = 0.0;      // pulse duration, s
  LaserParams params{};
};

inline OptimalProfile make_optimal_profile(const LaserParams& p, double T) {
  p.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("pulse duration T must be positive");
  const double x = T / p.tau_N;
  // e V N_th / (tau_N sinh x) without overflow for long pulses
  return {threshold_current(p) * 2.0 * std::exp(-x) / -std::expm1(-2.0 * x), p.tau_N, T, p};
}

namespace detail {

inline void check_profile_time(const OptimalProfile& prof, double t) {
  if (!(t >= 0.0 && t <= prof.T))
    throw DomainError("t = " + std::to_string(t) + " s is outside [0, T]");
}

// e^x / sinh(x) written without overflow.
inline double exp_over_sinh(double x) { return 2.0 / -std::expm1(-2.0 * x); }

}  // namespace detail

inline double optimal_current(const OptimalProfile& prof, double t) {
  detail::check_profile_time(prof, t);
  const double x = prof.T / prof.tau_N;
  return threshold_current(prof.params) * detail::exp_over_sinh(x) *
         std::exp((t - prof.T) / prof.tau_N);
}

/// dI/dt of the optimal profile; largest at t = T.
inline double optimal_current_slope(const OptimalProfile& prof, double t) {
  return optimal_current(prof, t) / prof.tau_N;
}

inline double optimal_carrier_trajectory(const OptimalProfile& prof, double t) {
  detail::check_profile_time(prof, t);
  if (t == prof.T) return threshold_density(prof.params);
  return threshold_density(prof.params) * std::sinh(t / prof.tau_N) /
         std::sinh(prof.T / prof.tau_N);
}

/// J(T) = int_0^T I^2 dt in A^2 s (energy dissipated per ohm of load).
inline double energy_loss(const OptimalProfile& prof) {
  const double q = kElementaryCharge * prof.params.V * threshold_density(prof.params);
  return q * q / prof.tau_N * detail::exp_over_sinh(prof.T / prof.tau_N);
}

/// lim J(T) for T -> infinity, equal to 2 tau_N I_th^2.
inline double energy_loss_limit(const LaserParams& p) {
  const double q = kElementaryCharge * p.V * threshold_density(p);
  return 2.0 * q * q / p.tau_N;
}

/// I(T) = 2 I_th / (1 - e^{-2T/tau_N}); tends to 2 I_th for long pulses.
inline double peak_current(const OptimalProfile& prof) { return optimal_current(prof, prof.T); }

/// B = tau_N^2 slew_max / (e V N_th); a finite duration meets the slew limit
/// only when B > 2.
inline double slew_parameter(const LaserParams& p, double slew_max) {
  return p.tau_N * p.tau_N * slew_max / (kElementaryCharge * p.V * threshold_density(p));
}

namespace detail {

inline double checked_slew_parameter(const LaserParams& p, double slew_max) {
  p.validate();
  if (!(slew_max > 0.0) || !std::isfinite(slew_max))
    throw DomainError("slew_max must be positive");
  const double B = slew_parameter(p, slew_max);
  if (!(B > 2.0))
    throw InfeasibleError("no finite duration satisfies the slew limit (B = " + std::to_string(B) +
                          " <= 2)");
  return B;
}

}  // namespace detail

/// Shortest T whose optimal profile has dI/dt(T) == slew_max.
///
/// dI/dt(T) = (e V N_th / tau_N^2) * 2/(1 - e^{-2T/tau_N}), which solves to
/// T = (tau_N/2) ln(B/(B-2)).
inline double min_duration_for_slew(const LaserParams& p, double slew_max) {
  const double B = detail::checked_slew_parameter(p, slew_max);
  return 0.5 * p.tau_N * std::log1p(2.0 / (B - 2.0));
}

/// tau_N sqrt(B/(B-2)): a longer, still feasible, duration bound. Always
/// >= min_duration_for_slew for the same B.
inline double conservative_duration_for_slew(const LaserParams& p, double slew_max) {
  const double B = detail::checked_slew_parameter(p, slew_max);
  return p.tau_N * std::sqrt(B / (B - 2.0));
}

enum class CutoffPolicy { AtT, AtSPeak, None };

inline std::string_view to_string(CutoffPolicy c) {
  switch (c) {
    case CutoffPolicy::AtT: return "at-T";
    case CutoffPolicy::AtSPeak: return "at-S-peak";
    case CutoffPolicy::None: return "none";
  }
  return "?";
}

inline std::optional<CutoffPolicy> parse_cutoff_policy(std::string_view s) {
  if (s == "at-T") return CutoffPolicy::AtT;
  if (s == "at-S-peak") return CutoffPolicy::AtSPeak;
  if (s == "none") return CutoffPolicy::None;
  return std::nullopt;
}

/// The optimal profile as a drive: exponential on [0, T], then held at I(T)
/// until the cutoff (T for at-T, never otherwise; at-S-peak is applied by
/// the simulator). `current_limit` clips the waveform, modelling a driver
/// with a bounded output current.
inline DriveWaveform optimal_drive(const OptimalProfile& prof, CutoffPolicy policy,
                                   double current_limit = std::numeric_limits<double>::infinity()) {
  const double cutoff =
      policy == CutoffPolicy::AtT ? prof.T : std::numeric_limits<double>::infinity();
  return DriveWaveform::from_function(
      [prof, current_limit](double t) {
        return std::min(current_limit, optimal_current(prof, std::clamp(t, 0.0, prof.T)));
      },
      cutoff, {prof.T});
}

inline Trajectory simulate_optimal(const OptimalProfile& prof, CutoffPolicy policy, double t_end,
                                   double dt_out,
                                   double current_limit = std::numeric_limits<double>::infinity()) {
  SimulationOptions opts;
  opts.cut_drive_at_first_peak = policy == CutoffPolicy::AtSPeak;
  return simulate(prof.params, optimal_drive(prof, policy, current_limit), t_end, dt_out, opts);
}

struct EfficiencyOptions {
  double dt_out = 0.5e-12;
  double current_limit = std::numeric_limits<double>::infinity();
};

struct EfficiencyRun {
  double eta = 0.0;
  double photon_integral = 0.0;  // int S dt, s/m^3
  double energy = 0.0;           // J(T), A^2 s
  double t_stop = 0.0;           // upper limit of the photon integral
  Trajectory trajectory;
};

/// Full-model efficiency measure int S dt / int_0^T I^2 dt for the optimal
/// profile of duration T. The photon integral stops once S has fallen below
/// 1e-6 of its peak, or 5 tau_N after the peak.
inline EfficiencyRun efficiency_run(const LaserParams& p, double T, CutoffPolicy policy,
                                    const EfficiencyOptions& eo = {}) {
  const OptimalProfile prof = make_optimal_profile(p, T);
  EfficiencyRun run;
  run.energy = energy_loss(prof);
  double t_end = T + 6.0 * p.tau_N;
  for (int attempt = 0;; ++attempt) {
    run.trajectory = simulate_optimal(prof, policy, t_end, eo.dt_out, eo.current_limit);
    const Trajectory& tr = run.trajectory;
    if (!tr.t_threshold || !tr.peak) throw NoLasingError("no lasing for given T");
    const double S_peak = tr.peak->S;
    const double horizon = tr.peak->t + 5.0 * p.tau_N;
    auto k0 = static_cast<std::size_t>(std::ceil(tr.peak->t / tr.dt));
    std::optional<double> decayed;
    for (std::size_t k = k0; k < tr.size(); ++k) {
      if (tr.time(k) > horizon) break;
      if (tr.samples[k].S < 1e-6 * S_peak) {
        decayed = tr.time(k);
        break;
      }
    }
    run.t_stop = decayed.value_or(horizon);
    if (run.t_stop <= tr.time(tr.size() - 1) || attempt >= 3) break;
    t_end = horizon + p.tau_N;
  }
  const Trajectory& tr = run.trajectory;
  double integral = 0.0;
  for (std::size_t k = 1; k < tr.size() && tr.time(k) <= run.t_stop * (1.0 + 1e-12); ++k)
    integral += 0.5 * (tr.samples[k - 1].S + tr.samples[k].S) * tr.dt;
  run.photon_integral = integral;
  run.eta = integral / run.energy;
  return run;
}

inline double efficiency_eta(const LaserParams& p, double T, CutoffPolicy policy,
                             const EfficiencyOptions& eo = {}) {
  return efficiency_run(p, T, policy, eo).eta;
}

/// One column entry per grid point; empty optionals mark per-point failures.
struct SweepResult {
  std::vector<double> T_grid;
  std::vector<double> J;
  std::vector<double> I_peak;
  std::vector<std::optional<double>> eta;
  std::vector<std::optional<double>> rho;
  std::vector<std::string> errors;  // empty string: no error

  std::size_t size() const noexcept { return T_grid.size(); }
};

struct SweepOptions {
  EfficiencyOptions efficiency{};
  unsigned threads = 1;
};

/// Evaluates J, I_peak, eta and rho of the simulated optical pulse at every
/// grid point. Points are independent, so the result does not depend on the
/// thread count.
inline SweepResult sweep_duration(const LaserParams& p, const std::vector<double>& T_grid,
                                  CutoffPolicy policy, const SweepOptions& so = {}) {
  p.validate();
  if (T_grid.empty()) throw DomainError("sweep grid is empty");
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    if (!(T_grid[i] > 0.0)) throw DomainError("sweep grid values must be positive");
    if (i > 0 && !(T_grid[i] > T_grid[i - 1]))
      throw DomainError("sweep grid must be strictly increasing");
  }
  const std::size_t n = T_grid.size();
  SweepResult r;
  r.T_grid = T_grid;
  r.J.resize(n);
  r.I_peak.resize(n);
  r.eta.resize(n);
  r.rho.resize(n);
  r.errors.resize(n);

  auto eval_point = [&](std::size_t i) {
    const OptimalProfile prof = make_optimal_profile(p, T_grid[i]);
    r.J[i] = energy_loss(prof);
    r.I_peak[i] = peak_current(prof);
    try {
      const EfficiencyRun run = efficiency_run(p, T_grid[i], policy, so.efficiency);
      r.eta[i] = run.eta;
      r.rho[i] = rho(run.trajectory.photon_density());
    } catch (const std::exception& e) {
      r.errors[i] = e.what();
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(so.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) eval_point(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += threads) eval_point(i);
      });
    for (auto& th : pool) th.join();
  }
  return r;
}

struct OptimalityReport {
  double J_star = 0.0;          // quadrature of the unperturbed profile
  double J_star_closed = 0.0;   // energy_loss()
  double min_J = 0.0;           // smallest perturbed J
  double min_excess = 0.0;      // min_J - J_star
  std::size_t n_perturbations = 0;
  std::size_t n_below = 0;      // perturbations with J < J_star (1 - 1e-9)

  bool optimal() const { return min_excess >= -1e-9 * J_star; }
};

struct OptimalityOptions {
  double eps_rel = 0.01;            // perturbation amplitude as a fraction of N_th
  std::size_t modes = 10;           // sine modes in each perturbation
  std::size_t quadrature_points = 4097;  // odd, composite Simpson
};

namespace detail {

// Composite Simpson of u(t)^2 with u = b (x' + a x) for x = x* + eps*delta.
inline double perturbed_energy(const OptimalProfile& prof, const std::vector<double>& coeffs,
                               double eps, std::size_t n_points) {
  const double a = 1.0 / prof.tau_N;
  const double b = kElementaryCharge * prof.params.V;
  const double N_th = threshold_density(prof.params);
  const double T = prof.T;
  const double sh = std::sinh(a * T);
  const std::size_t n = n_points | 1u;
  const double h = T / static_cast<double>(n - 1);
  const double pi = std::acos(-1.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = h * static_cast<double>(k);
    double x = N_th * std::sinh(a * t) / sh;
    double xd = N_th * a * std::cosh(a * t) / sh;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
      if (coeffs[m] == 0.0) continue;
      const double w = static_cast<double>(m + 1) * pi / T;
      x += eps * coeffs[m] * std::sin(w * t);
      xd += eps * coeffs[m] * w * std::cos(w * t);
    }
    const double u = b * (xd + a * x);
    const double wgt = (k == 0 || k == n - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += wgt * u * u;
  }
  return acc * h / 3.0;
}

}  // namespace detail

/// Perturbs the optimal carrier trajectory with random sine series that
/// vanish at both ends, maps each back to a current and checks none of them
/// dissipates less than the optimum.
inline OptimalityReport verify_optimality(const LaserParams& p, double T,
                                          std::size_t n_perturbations, std::uint64_t seed,
                                          const OptimalityOptions& oo = {}) {
  if (n_perturbations < 1) throw DomainError("n_perturbations must be >= 1");
  const OptimalProfile prof = make_optimal_profile(p, T);
  const double eps = oo.eps_rel * threshold_density(p);

  OptimalityReport rep;
  rep.n_perturbations = n_perturbations;
  rep.J_star_closed = energy_loss(prof);
  rep.J_star = detail::perturbed_energy(prof, {}, 0.0, oo.quadrature_points);
  rep.min_J = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_perturbations; ++i) {
    SplitMix64 rng(derive_seed(seed, i));
    std::vector<double> c(oo.modes);
    double l1 = 0.0;
    for (double& v : c) {
      v = rng.uniform(-1.0, 1.0);
      l1 += std::abs(v);
    }
    for (double& v : c) v /= l1;  // max |delta| <= 1
    const double J = detail::perturbed_energy(prof, c, eps, oo.quadrature_points);
    rep.min_J = std::min(rep.min_J, J);
    if (J < rep.J_star * (1.0 - 1e-9)) ++rep.n_below;
  }
  rep.min_excess = rep.min_J - rep.J_star;
  return rep;
}

/// Perturbed energy for an explicit sine-series perturbation (coefficient m
/// multiplies sin((m+1) pi t / T)); exposed for direct checks.
inline double perturbed_energy(const LaserParams& p, double T, const std::vector<double>& coeffs,
                               double eps, std::size_t quadrature_points = 4097) {
  return detail::perturbed_energy(make_optimal_profile(p, T), coeffs, eps, quadrature_points);
}

}  // namespace gainswitch
