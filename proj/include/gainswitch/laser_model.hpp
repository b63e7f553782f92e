#pragma once

// Single-mode semiconductor laser rate equations.
//
//   dN/dt = I/(e V) - N/tau_N - g(N, S)
//   dS/dt = Gamma g(N, S) - S/tau_P + Gamma beta N/tau_N
//   g(N, S) = g0 (N - N_t) S / (1 + eps S)
//
// Densities are in 1/m^3, times in s, currents in A.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gainswitch/errors.hpp"
#include "gainswitch/ode.hpp"
#include "gainswitch/signal.hpp"

namespace gainswitch {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

struct LaserParams {
  double tau_N = 0.0;  // carrier lifetime, s
  double tau_P = 0.0;  // photon lifetime, s
  double Gamma = 0.0;  // mode confinement
  double beta = 0.0;   // spontaneous emission fraction
  double g0 = 0.0;     // gain slope, m^3/s
  double N_t = 0.0;    // transparency density, 1/m^3
  double eps = 0.0;    // gain compression, m^3
  double V = 0.0;      // active volume, m^3

  /// Throws InputError naming the first violated constraint.
  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw InputError(std::string("laser parameter ") + name + " must be positive and finite");
    };
    positive(tau_N, "tau_N");
    positive(tau_P, "tau_P");
    positive(Gamma, "Gamma");
    positive(beta, "beta");
    positive(g0, "g0");
    positive(N_t, "N_t");
    positive(eps, "eps");
    positive(V, "V");
    if (Gamma > 1.0) throw InputError("laser parameter Gamma must be in (0, 1]");
    if (beta >= 1.0) throw InputError("laser parameter beta must be in (0, 1)");
    if (!(tau_P < tau_N)) throw InputError("laser parameter tau_P must be smaller than tau_N");
  }
};

/// The `default-1W-850nm` fixture: textbook values for a ~1 W 850 nm diode.
inline LaserParams default_laser() {
  return LaserParams{2e-9, 1e-12, 0.3, 1e-4, 1.5e-12, 1e24, 1e-23, 1e-16};
}

struct LaserState {
  double N = 0.0;
  double S = 0.0;
};

struct RateDerivatives {
  double dN = 0.0;
  double dS = 0.0;
};

inline double gain(const LaserParams& p, double N, double S) {
  return p.g0 * (N - p.N_t) * S / (1.0 + p.eps * S);
}

inline double threshold_density(const LaserParams& p) {
  return p.N_t + 1.0 / (p.tau_P * p.Gamma * p.g0);
}

inline double threshold_current(const LaserParams& p) {
  return kElementaryCharge * p.V * threshold_density(p) / p.tau_N;
}

inline RateDerivatives rate_derivatives(const LaserParams& p, const LaserState& s, double I) {
  const double g = gain(p, s.N, s.S);
  return {I / (kElementaryCharge * p.V) - s.N / p.tau_N - g,
          p.Gamma * g - s.S / p.tau_P + p.Gamma * p.beta * s.N / p.tau_N};
}

/// Time-indexed drive current, zero before t = 0 and from the cutoff on.
///
/// Internally a sequence of pieces; each piece is smooth on its closed
/// interval so integrators can step piece by piece without straddling jumps.
class DriveWaveform {
 public:
  using Function = std::function<double(double)>;

  struct Piece {
    double start = 0.0;
    double end = 0.0;
    std::shared_ptr<const Function> fn;  // null: constant
    double constant = 0.0;

    double operator()(double t) const {
      const double v = fn ? (*fn)(std::clamp(t, start, end)) : constant;
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InputError("drive current must be finite and nonnegative (t = " +
                         std::to_string(t) + " s)");
      return v;
    }
  };

  DriveWaveform() = default;

  static DriveWaveform zero() { return DriveWaveform{}; }

  /// Closed-form generator `fn` on [0, cutoff); `breakpoints` are times where
  /// `fn` is continuous but not smooth (or defined piecewise).
  static DriveWaveform from_function(Function fn,
                                     double cutoff = std::numeric_limits<double>::infinity(),
                                     std::vector<double> breakpoints = {}) {
    DriveWaveform d;
    auto shared = std::make_shared<const Function>(std::move(fn));
    std::vector<double> edges{0.0};
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double b : breakpoints)
      if (b > edges.back() && b < cutoff) edges.push_back(b);
    edges.push_back(cutoff);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      d.pieces_.push_back(Piece{edges[i], edges[i + 1], shared, 0.0});
    d.cutoff_ = cutoff;
    return d;
  }

  /// Zero-order hold of `samples`; the current is zero after the last sample
  /// interval or from `cutoff`, whichever is earlier.
  static DriveWaveform from_samples(const SampledSignal& samples,
                                    double cutoff = std::numeric_limits<double>::infinity()) {
    DriveWaveform d;
    const double end = std::min(cutoff, samples.time(samples.size()));
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double a = std::max(0.0, samples.time(k));
      const double b = std::min(end, samples.time(k + 1));
      if (b <= a) continue;
      d.pieces_.push_back(Piece{a, b, nullptr, samples[k]});
    }
    d.cutoff_ = end;
    return d;
  }

  double cutoff() const noexcept { return cutoff_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }

  /// Same waveform forced to zero from `t_off` on.
  DriveWaveform with_cutoff(double t_off) const {
    DriveWaveform d;
    for (const Piece& p : pieces_) {
      if (p.start >= t_off) break;
      Piece q = p;
      q.end = std::min(q.end, t_off);
      d.pieces_.push_back(q);
    }
    d.cutoff_ = std::min(cutoff_, t_off);
    return d;
  }

  double operator()(double t) const {
    if (t < 0.0 || t >= cutoff_ || pieces_.empty()) return 0.0;
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                               [](double x, const Piece& p) { return x < p.start; });
    if (it == pieces_.begin()) return 0.0;
    --it;
    if (t >= it->end) return 0.0;
    return (*it)(t);
  }

 private:
  std::vector<Piece> pieces_;
  double cutoff_ = 0.0;
};

struct TrajectorySample {
  double N = 0.0;
  double S = 0.0;
  double I = 0.0;
};

struct PeakEvent {
  double t = 0.0;
  double S = 0.0;
};

/// Uniformly sampled simulation output plus events located by the integrator.
struct Trajectory {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<TrajectorySample> samples;
  std::optional<double> t_threshold;  // first time N >= N_th
  std::optional<PeakEvent> peak;      // global maximum of S
  std::optional<double> drive_cutoff;  // set when the drive was cut at the first S peak
  std::size_t clamp_count = 0;         // negative-density excursions forced to 0

  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  std::size_t size() const noexcept { return samples.size(); }

  SampledSignal photon_density() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.S);
    return SampledSignal(dt, std::move(v), t0);
  }

  SampledSignal carrier_density() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.N);
    return SampledSignal(dt, std::move(v), t0);
  }

  SampledSignal current() const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.I);
    return SampledSignal(dt, std::move(v), t0);
  }
};

struct SimulationOptions {
  LaserState initial{};
  /// Force the drive to zero at the first S maximum after threshold.
  bool cut_drive_at_first_peak = false;
  ode::Tolerances tol{1e-8, 1.0};
};

namespace detail {

inline std::size_t output_count(double t_end, double dt_out) {
  return static_cast<std::size_t>(std::floor(t_end / dt_out + 1e-9)) + 1;
}

inline void check_run_args(double t_end, double dt_out) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be positive");
  if (!(dt_out > 0.0) || !std::isfinite(dt_out)) throw DomainError("dt_out must be positive");
  if (t_end / dt_out > 5e7) throw DomainError("output grid too large (t_end/dt_out > 5e7)");
}

// Gauss-Legendre 8-point nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> kGaussNodes{
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGaussWeights{
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace detail

/// Integrates the full nonlinear rate equations with adaptive DP5(4) steps and
/// resamples onto k*dt_out, k = 0 .. floor(t_end/dt_out).
inline Trajectory simulate(const LaserParams& p, const DriveWaveform& drive, double t_end,
                           double dt_out, const SimulationOptions& opts = {}) {
  p.validate();
  detail::check_run_args(t_end, dt_out);
  if (opts.initial.N < 0.0 || opts.initial.S < 0.0)
    throw DomainError("initial densities must be nonnegative");

  const double N_th = threshold_density(p);
  Trajectory traj;
  traj.dt = dt_out;
  const std::size_t n_out = detail::output_count(t_end, dt_out);
  traj.samples.reserve(n_out);

  std::optional<double> cut_at;
  auto drive_at = [&](double t) { return (cut_at && t >= *cut_at) ? 0.0 : drive(t); };

  traj.samples.push_back({opts.initial.N, opts.initial.S, drive_at(0.0)});
  if (opts.initial.N >= N_th) traj.t_threshold = 0.0;
  traj.peak = PeakEvent{0.0, opts.initial.S};

  // Integration pieces: drive pieces clipped to [0, t_end], then zero drive.
  struct Segment {
    double a, b;
    const DriveWaveform::Piece* piece;
  };
  std::vector<Segment> segments;
  double cursor = 0.0;
  for (const auto& pc : drive.pieces()) {
    if (pc.start >= t_end) break;
    if (pc.start > cursor) segments.push_back({cursor, pc.start, nullptr});
    segments.push_back({pc.start, std::min(pc.end, t_end), &pc});
    cursor = std::min(pc.end, t_end);
  }
  if (cursor < t_end) segments.push_back({cursor, t_end, nullptr});

  ode::Options ode_opts;
  ode_opts.tol = opts.tol;
  ode::State<2> y{opts.initial.N, opts.initial.S};
  std::size_t next_out = 1;
  double t = 0.0;

  for (std::size_t si = 0; si < segments.size(); ++si) {
    const Segment& seg = segments[si];
    const DriveWaveform::Piece* piece = cut_at ? nullptr : seg.piece;
    double seg_end = seg.b;
    if (t >= seg_end) continue;

    while (t < seg_end) {
      auto current = [&](double tt) { return piece ? (*piece)(tt) : 0.0; };
      auto rhs = [&](double tt, const ode::State<2>& s) {
        const auto d = rate_derivatives(p, {s[0], s[1]}, current(tt));
        return ode::State<2>{d.dN, d.dS};
      };
      auto dS_at = [&](double tt, const ode::State<2>& s) {
        return rate_derivatives(p, {s[0], s[1]}, current(tt)).dS;
      };

      bool cut_now = false;
      bool negative = false;
      auto observer = [&](const ode::DenseStep<2>& st) -> std::optional<double> {
        const double t0s = st.t0, t1s = st.t1();
        std::optional<double> stop;

        if (st.y1[0] < 0.0 || st.y1[1] < 0.0) {
          negative = true;
          stop = t1s;
        }

        if (!traj.t_threshold && st.y1[0] >= N_th) {
          traj.t_threshold =
              st.y0[0] >= N_th
                  ? t0s
                  : ode::find_root([&](double tt) { return st(tt)[0] - N_th; }, t0s, t1s,
                                   st.y0[0] - N_th, st.y1[0] - N_th);
        }

        const double g0s = dS_at(t0s, st.y0);
        const double g1s = dS_at(t1s, st.y1);
        if (g0s > 0.0 && g1s <= 0.0) {
          const double tp = ode::find_root([&](double tt) { return dS_at(tt, st(tt)); }, t0s,
                                           t1s, g0s, g1s);
          const double Sp = st(tp)[1];
          if (Sp > traj.peak->S) traj.peak = PeakEvent{tp, Sp};
          if (opts.cut_drive_at_first_peak && !cut_at && traj.t_threshold &&
              *traj.t_threshold <= tp) {
            cut_at = tp;
            cut_now = true;
            stop = tp;
          }
        }
        if (st.y1[1] > traj.peak->S) traj.peak = PeakEvent{t1s, st.y1[1]};

        const double t_emit = stop.value_or(t1s);
        while (next_out < n_out) {
          const double to = traj.time(next_out);
          if (to > t_emit) break;
          const auto yo = st(to);
          double No = yo[0], So = yo[1];
          if (No < 0.0) {
            No = 0.0;
            ++traj.clamp_count;
          }
          if (So < 0.0) {
            So = 0.0;
            ++traj.clamp_count;
          }
          traj.samples.push_back({No, So, drive_at(to)});
          ++next_out;
        }
        return stop;
      };

      const auto res = ode::integrate<2>(rhs, y, t, seg_end, ode_opts, observer);
      t = res.t;
      y = res.y;
      if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
        throw IntegrationError("non-finite state", t);
      if (negative) {
        for (double& v : y) {
          if (v < 0.0) {
            v = 0.0;
            ++traj.clamp_count;
          }
        }
      }
      if (cut_now) {
        // Remaining time runs with zero drive as a single segment.
        piece = nullptr;
        seg_end = t_end;
        si = segments.size();
      }
    }
  }
  // Grid points within floating-point slack of t_end.
  while (next_out < n_out) {
    traj.samples.push_back({std::max(0.0, y[0]), std::max(0.0, y[1]), drive_at(traj.time(next_out))});
    ++next_out;
  }
  traj.drive_cutoff = cut_at;
  if (traj.peak->S <= 0.0) traj.peak.reset();
  return traj;
}

/// Integrates the below-threshold linear model dN/dt = I/(eV) - N/tau_N with
/// S held at zero. Each sub-step applies the exact propagator and evaluates
/// the forcing convolution by 8-point Gauss-Legendre quadrature; sub-steps
/// never straddle a drive breakpoint.
inline Trajectory simulate_linear(const LaserParams& p, const DriveWaveform& drive, double t_end,
                                  double dt_out, const SimulationOptions& opts = {}) {
  p.validate();
  detail::check_run_args(t_end, dt_out);
  if (opts.initial.N < 0.0) throw DomainError("initial density must be nonnegative");

  const double N_th = threshold_density(p);
  const double eV = kElementaryCharge * p.V;
  const double tau = p.tau_N;
  const double h_max = tau / 8.0;

  Trajectory traj;
  traj.dt = dt_out;
  const std::size_t n_out = detail::output_count(t_end, dt_out);
  traj.samples.reserve(n_out);
  traj.samples.push_back({opts.initial.N, 0.0, drive(0.0)});
  if (opts.initial.N >= N_th) traj.t_threshold = 0.0;

  std::vector<double> edges;
  for (const auto& pc : drive.pieces()) {
    edges.push_back(pc.start);
    edges.push_back(pc.end);
  }
  std::sort(edges.begin(), edges.end());

  auto piece_at = [&](double a, double b) -> const DriveWaveform::Piece* {
    const double mid = 0.5 * (a + b);
    for (const auto& pc : drive.pieces())
      if (pc.start <= mid && mid < pc.end) return &pc;
    return nullptr;
  };

  // Exact propagation over [a, b] inside a single drive piece.
  auto advance = [&](double N, double a, double b, const DriveWaveform::Piece* pc) {
    const double h = b - a;
    double forced = 0.0;
    if (pc) {
      if (!pc->fn) {
        forced = pc->constant * tau / eV * -std::expm1(-h / tau);
      } else {
        const double half = 0.5 * h, mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < 8; ++i) {
          const double s = mid + half * detail::kGaussNodes[i];
          forced += detail::kGaussWeights[i] * std::exp(-(b - s) / tau) * (*pc)(s);
        }
        forced *= half / eV;
      }
    }
    return N * std::exp(-h / tau) + forced;
  };

  double N = opts.initial.N;
  double t = 0.0;
  for (std::size_t k = 1; k < n_out; ++k) {
    const double tk = traj.time(k);
    while (t < tk) {
      double b = std::min(tk, t + h_max);
      auto e = std::upper_bound(edges.begin(), edges.end(), t);
      if (e != edges.end() && *e < b) b = *e;
      const auto* pc = piece_at(t, b);
      const double Nb = advance(N, t, b, pc);
      if (!std::isfinite(Nb)) throw IntegrationError("non-finite state", b);
      if (!traj.t_threshold && Nb >= N_th) {
        const double Na = N, ta = t;
        traj.t_threshold = ode::find_root(
            [&](double tt) { return advance(Na, ta, tt, pc) - N_th; }, t, b, N - N_th, Nb - N_th);
      }
      N = Nb;
      t = b;
    }
    double No = N;
    if (No < 0.0) {
      No = 0.0;
      ++traj.clamp_count;
    }
    traj.samples.push_back({No, 0.0, drive(tk)});
  }
  return traj;
}

}  // namespace gainswitch
