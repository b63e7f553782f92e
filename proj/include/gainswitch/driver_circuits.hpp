#pragma once

// Current waveforms of laser driver topologies that approximate an
// exponentially rising current, a resonant-discharge baseline, and a
// least-squares fit of any of them to a reference waveform.
//
// The laser is treated as a current sink (or as a resistive load R for the
// RLC stage); junction nonlinearity is not modelled.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "gainswitch/errors.hpp"
#include "gainswitch/nelder_mead.hpp"
#include "gainswitch/ode.hpp"
#include "gainswitch/random.hpp"
#include "gainswitch/signal.hpp"

namespace gainswitch {

inline constexpr double kPi = 3.14159265358979323846;

namespace detail {
inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InputError(std::string(what) + " must be positive and finite");
}
}  // namespace detail

// --- push-pull BJT stage -------------------------------------------------

/// Emitter current of a BJT whose base-emitter voltage ramps linearly.
struct BjtParams {
  double I_ES = 0.0;       // A
  double V_T = 0.026;      // V
  double ramp_rate = 0.0;  // dV_BE/dt, V/s
  double t_on = 0.0;       // s

  void validate() const {
    detail::require_positive(I_ES, "I_ES");
    detail::require_positive(V_T, "V_T");
    detail::require_positive(ramp_rate, "ramp_rate");
    detail::require_positive(t_on, "t_on");
  }
};

/// I_ES (exp(ramp_rate t / V_T) - 1) on [0, t_on].
inline double bjt_current(const BjtParams& p, double t) {
  p.validate();
  if (!(t >= 0.0 && t <= p.t_on))
    throw DomainError("bjt_current: t outside [0, t_on]");
  return p.I_ES * std::expm1(p.ramp_rate * t / p.V_T);
}

// --- multi-resonant LC network -------------------------------------------

struct LcBranch {
  double L = 0.0;  // H
  double C = 0.0;  // F
};

struct MultiResonantParams {
  std::vector<LcBranch> branches;
  double V0 = 0.0;  // initial capacitor voltage, V

  void validate() const {
    if (branches.empty()) throw InputError("multi-resonant network needs at least one branch");
    for (const auto& b : branches) {
      detail::require_positive(b.L, "branch L");
      detail::require_positive(b.C, "branch C");
    }
    detail::require_positive(V0, "V0");
  }
};

/// Current of one undamped branch, V0 sin(t/sqrt(LC)) / sqrt(L/C).
inline double lc_branch_current(const LcBranch& b, double V0, double t) {
  return V0 * std::sin(t / std::sqrt(b.L * b.C)) / std::sqrt(b.L / b.C);
}

/// Superposed branch currents, signed so the first lobe through the diode is
/// positive. Only physical up to the natural turn-off time.
inline double multi_resonant_current(const MultiResonantParams& p, double t) {
  p.validate();
  if (!(t >= 0.0)) throw DomainError("multi_resonant_current: t must be >= 0");
  double I = 0.0;
  for (const auto& b : p.branches) I += lc_branch_current(b, p.V0, t);
  return I;
}

/// First zero of the total current after its first maximum: the time at which
/// the network turns the laser off by itself.
inline double multi_resonant_turn_off(const MultiResonantParams& p) {
  p.validate();
  double min_period = std::numeric_limits<double>::infinity(), max_period = 0.0;
  for (const auto& b : p.branches) {
    const double per = 2.0 * kPi * std::sqrt(b.L * b.C);
    min_period = std::min(min_period, per);
    max_period = std::max(max_period, per);
  }
  const double h = min_period / 400.0;
  const auto n = static_cast<std::size_t>(std::ceil(4.0 * max_period / h));
  auto I = [&](double t) { return multi_resonant_current(p, t); };
  bool past_peak = false;
  double prev = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = h * static_cast<double>(k);
    const double cur = I(t);
    if (!past_peak && cur < prev) past_peak = true;
    if (past_peak && cur <= 0.0) {
      const double a = t - h;
      return ode::find_root(I, a, t, I(a), cur);
    }
    prev = cur;
  }
  throw InputError("multi-resonant current does not return to zero within four periods");
}

// --- push-pull stage with capacitor across the load ------------------------

/// Voltage step V through stray inductance L into R parallel C.
struct RlcParams {
  double R = 0.0;  // ohm
  double C = 0.0;  // F
  double L = 0.0;  // H
  double V = 0.0;  // V

  void validate() const {
    detail::require_positive(R, "R");
    detail::require_positive(C, "C");
    detail::require_positive(L, "L");
    detail::require_positive(V, "V");
  }
};

enum class Damping { Underdamped, Critical, Overdamped };

/// Regime from the sign of 4 R^2 C / L - 1; within 1e-9 counts as critical.
inline Damping rlc_damping(const RlcParams& p) {
  const double D = 4.0 * p.R * p.R * p.C / p.L - 1.0;
  if (std::abs(D) <= 1e-9) return Damping::Critical;
  return D > 0.0 ? Damping::Underdamped : Damping::Overdamped;
}

/// Current through R after the step, with tau = 2RC and
/// alpha = sqrt(|4R^2C/L - 1|). The overdamped (hyperbolic) branch is an
/// extension so that every parameter set has a closed form.
inline double rlc_step_response(const RlcParams& p, double t) {
  p.validate();
  if (!(t >= 0.0)) throw DomainError("rlc_step_response: t must be >= 0");
  const double tau = 2.0 * p.R * p.C;
  const double D = 4.0 * p.R * p.R * p.C / p.L - 1.0;
  const double x = t / tau;
  const double e = std::exp(-x);
  const double I_inf = p.V / p.R;
  switch (rlc_damping(p)) {
    case Damping::Critical:
      return I_inf * (1.0 - e * (1.0 + x));
    case Damping::Underdamped: {
      const double a = std::sqrt(D);
      return I_inf * (1.0 - e * std::cos(a * x) - e * std::sin(a * x) / a);
    }
    case Damping::Overdamped: {
      const double a = std::sqrt(-D);
      return I_inf * (1.0 - e * std::cosh(a * x) - e * std::sinh(a * x) / a);
    }
  }
  return 0.0;
}

/// Push-pull stage with stray inductance only: I = V t / L.
inline double rl_ramp_current(double V, double L, double t) { return V * t / L; }

// --- saturating inductor ----------------------------------------------------

struct SatInductorParams {
  double L0 = 0.0;       // unsaturated inductance, H
  double L_sat = 0.0;    // saturated inductance, H
  double sigma = 0.0;    // knee sharpness, 1/A
  double I1 = 0.0;       // half-saturation current, A
  double L_diode = 0.0;  // diode package inductance, H
  double V = 0.0;        // drive voltage, V

  void validate() const {
    detail::require_positive(L_sat, "L_sat");
    if (!(L0 > L_sat) || !std::isfinite(L0)) throw InputError("L0 must exceed L_sat");
    detail::require_positive(sigma, "sigma");
    detail::require_positive(I1, "I1");
    detail::require_positive(L_diode, "L_diode");
    detail::require_positive(V, "V");
  }
};

/// Fixture for a 35 nH / 5 nH inductor with 5 nH of diode inductance. I1 is
/// half the 750 mA threshold of the target diode; sigma and V are our choice.
inline SatInductorParams default_sat_inductor() { return {35e-9, 5e-9, 10.0, 0.375, 5e-9, 5.0}; }

/// L(I) = L_sat + (L0 - L_sat)/2 (1 - (2/pi) atan(sigma (I - I1))).
inline double saturating_inductance(const SatInductorParams& p, double I) {
  return p.L_sat + 0.5 * (p.L0 - p.L_sat) * (1.0 - (2.0 / kPi) * std::atan(p.sigma * (I - p.I1)));
}

namespace detail {
// sigma may go to zero only through this path (limit studies).
inline SampledSignal integrate_sat_inductor(const SatInductorParams& p, double t_end, double dt_out,
                                            double rtol) {
  if (!(t_end > 0.0) || !(dt_out > 0.0)) throw DomainError("t_end and dt_out must be positive");
  const auto n = static_cast<std::size_t>(std::floor(t_end / dt_out + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(n);
  out.push_back(0.0);
  auto rhs = [&](double, const ode::State<1>& y) {
    return ode::State<1>{p.V / (saturating_inductance(p, y[0]) + p.L_diode)};
  };
  ode::Options opt;
  opt.tol = {rtol, 1e-15};
  std::size_t next = 1;
  auto observer = [&](const ode::DenseStep<1>& st) -> std::optional<double> {
    while (next < n && dt_out * static_cast<double>(next) <= st.t1()) {
      out.push_back(st(dt_out * static_cast<double>(next))[0]);
      ++next;
    }
    return std::nullopt;
  };
  const auto res = ode::integrate<1>(rhs, ode::State<1>{0.0}, 0.0, t_end, opt, observer);
  if (!std::isfinite(res.y[0])) throw IntegrationError("non-finite state", res.t);
  while (next < n) {
    out.push_back(res.y[0]);
    ++next;
  }
  for (double v : out)
    if (!std::isfinite(v)) throw IntegrationError("non-finite state", res.t);
  return SampledSignal(dt_out, std::move(out));
}
}  // namespace detail

/// Current of V switched onto the saturating inductor in series with the
/// diode inductance, dI/dt = V / (L(I) + L_diode), I(0) = 0.
inline SampledSignal saturating_inductor_current(const SatInductorParams& p, double t_end,
                                                 double dt_out) {
  p.validate();
  return detail::integrate_sat_inductor(p, t_end, dt_out, 1e-11);
}

/// I_sat ~ N B_sat S / L with unit constant; an order-of-magnitude estimate.
inline double estimate_saturation_current(double N_turns, double B_sat, double S_area, double L) {
  detail::require_positive(N_turns, "N_turns");
  detail::require_positive(B_sat, "B_sat");
  detail::require_positive(S_area, "S_area");
  detail::require_positive(L, "L");
  return N_turns * B_sat * S_area / L;
}

// --- resonant capacitive-discharge baseline --------------------------------

struct ResonantRingParams {
  double C = 0.0;       // F
  double L = 0.0;       // H
  double R_loss = 0.0;  // ohm, may be zero (lossless)
  double V0 = 0.0;      // V
  double t_off = 0.0;   // transistor turn-off, s

  void validate() const {
    detail::require_positive(C, "C");
    detail::require_positive(L, "L");
    if (!(R_loss >= 0.0) || !std::isfinite(R_loss)) throw InputError("R_loss must be >= 0");
    detail::require_positive(V0, "V0");
    detail::require_positive(t_off, "t_off");
    if (!(R_loss < 2.0 * std::sqrt(L / C)))
      throw InputError("resonant ring must be underdamped (R_loss < 2 sqrt(L/C))");
  }
};

/// Series RLC discharge of C from V0: (V0/(w_d L)) e^{-a t} sin(w_d t) with
/// a = R/(2L), cut to zero from t_off.
inline double resonant_ring_current(const ResonantRingParams& p, double t) {
  p.validate();
  if (!(t >= 0.0)) throw DomainError("resonant_ring_current: t must be >= 0");
  if (t >= p.t_off) return 0.0;
  const double a = p.R_loss / (2.0 * p.L);
  const double wd = std::sqrt(1.0 / (p.L * p.C) - a * a);
  return p.V0 / (wd * p.L) * std::exp(-a * t) * std::sin(wd * t);
}

// --- efficiency ---------------------------------------------------------------

/// Wall-plug efficiency P_optical / (P_driver + P_main).
inline double driver_efficiency(double P_optical, double P_driver, double P_main) {
  if (!(P_optical >= 0.0)) throw DomainError("P_optical must be >= 0");
  if (!(P_driver >= 0.0) || !(P_main >= 0.0)) throw DomainError("supply powers must be >= 0");
  const double den = P_driver + P_main;
  if (!(den > 0.0)) throw DomainError("P_driver + P_main must be positive");
  return P_optical / den;
}

// --- topologies and fitting ----------------------------------------------------

enum class Topology { Bjt, MultiResonant, Rlc, SatInductor, ResonantRing };

inline std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::Bjt: return "bjt";
    case Topology::MultiResonant: return "multi-resonant";
    case Topology::Rlc: return "rlc";
    case Topology::SatInductor: return "sat-inductor";
    case Topology::ResonantRing: return "resonant-ring";
  }
  return "?";
}

inline std::optional<Topology> parse_topology(std::string_view s) {
  for (Topology t : {Topology::Bjt, Topology::MultiResonant, Topology::Rlc, Topology::SatInductor,
                     Topology::ResonantRing})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

using TopologyParams =
    std::variant<BjtParams, MultiResonantParams, RlcParams, SatInductorParams, ResonantRingParams>;

inline Topology topology_of(const TopologyParams& p) { return static_cast<Topology>(p.index()); }

/// Parameter names in the flat-vector order used by fitting, in SI units.
inline std::vector<std::string> parameter_names(Topology t, std::size_t branches = 1) {
  switch (t) {
    case Topology::Bjt: return {"I_ES", "ramp_rate", "V_T", "t_on"};
    case Topology::MultiResonant: {
      std::vector<std::string> n{"V0"};
      for (std::size_t i = 1; i <= branches; ++i) {
        n.push_back("L" + std::to_string(i));
        n.push_back("C" + std::to_string(i));
      }
      return n;
    }
    case Topology::Rlc: return {"R", "C", "L", "V"};
    case Topology::SatInductor: return {"L0", "L_sat", "sigma", "I1", "L_diode", "V"};
    case Topology::ResonantRing: return {"C", "L", "R_loss", "V0", "t_off"};
  }
  return {};
}

inline std::vector<double> to_vector(const TopologyParams& tp) {
  return std::visit(
      [](const auto& p) -> std::vector<double> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BjtParams>) {
          return {p.I_ES, p.ramp_rate, p.V_T, p.t_on};
        } else if constexpr (std::is_same_v<P, MultiResonantParams>) {
          std::vector<double> v{p.V0};
          for (const auto& b : p.branches) {
            v.push_back(b.L);
            v.push_back(b.C);
          }
          return v;
        } else if constexpr (std::is_same_v<P, RlcParams>) {
          return {p.R, p.C, p.L, p.V};
        } else if constexpr (std::is_same_v<P, SatInductorParams>) {
          return {p.L0, p.L_sat, p.sigma, p.I1, p.L_diode, p.V};
        } else {
          return {p.C, p.L, p.R_loss, p.V0, p.t_off};
        }
      },
      tp);
}

inline TopologyParams from_vector(Topology t, const std::vector<double>& v) {
  auto need = [&](std::size_t n) {
    if (v.size() != n)
      throw InputError(std::string(to_string(t)) + " expects " + std::to_string(n) +
                       " parameters, got " + std::to_string(v.size()));
  };
  switch (t) {
    case Topology::Bjt:
      need(4);
      return BjtParams{v[0], v[2], v[1], v[3]};
    case Topology::MultiResonant: {
      if (v.size() < 3 || v.size() % 2 == 0)
        throw InputError("multi-resonant expects V0 followed by (L, C) pairs");
      MultiResonantParams p;
      p.V0 = v[0];
      for (std::size_t i = 1; i + 1 < v.size(); i += 2) p.branches.push_back({v[i], v[i + 1]});
      return p;
    }
    case Topology::Rlc:
      need(4);
      return RlcParams{v[0], v[1], v[2], v[3]};
    case Topology::SatInductor:
      need(6);
      return SatInductorParams{v[0], v[1], v[2], v[3], v[4], v[5]};
    case Topology::ResonantRing:
      need(5);
      return ResonantRingParams{v[0], v[1], v[2], v[3], v[4]};
  }
  throw InputError("unknown topology");
}

namespace detail {
inline std::vector<double> sample_waveform(const TopologyParams& tp, double t0, double dt,
                                           std::size_t n, double sat_rtol) {
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  if (const auto* s = std::get_if<SatInductorParams>(&tp)) {
    s->validate();
    const double t_last = t0 + dt * static_cast<double>(n - 1);
    if (t0 != 0.0 || t_last <= 0.0) {
      // Evaluate on a grid from 0 and pick the requested samples.
      throw DomainError("sat-inductor waveforms are sampled from t = 0");
    }
    const SampledSignal sig = integrate_sat_inductor(*s, t_last, dt, sat_rtol);
    for (std::size_t k = 0; k < n && k < sig.size(); ++k) out[k] = sig[k];
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + dt * static_cast<double>(k);
    out[k] = std::visit(
        [t](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, BjtParams>) {
            return t >= p.t_on ? 0.0 : bjt_current(p, t);
          } else if constexpr (std::is_same_v<P, MultiResonantParams>) {
            return multi_resonant_current(p, t);
          } else if constexpr (std::is_same_v<P, RlcParams>) {
            return rlc_step_response(p, t);
          } else if constexpr (std::is_same_v<P, ResonantRingParams>) {
            return resonant_ring_current(p, t);
          } else {
            return 0.0;
          }
        },
        tp);
  }
  return out;
}
}  // namespace detail

/// Samples the topology current at t0 + k dt, k = 0 .. n-1. The BJT stage is
/// zero from t_on (S2 shorts the diode).
inline std::vector<double> topology_waveform(const TopologyParams& tp, double dt, std::size_t n,
                                             double t0 = 0.0) {
  return detail::sample_waveform(tp, t0, dt, n, 1e-11);
}

/// Box constraints on the flat parameter vector; lo == hi pins a parameter.
struct FitBounds {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct FitOptions {
  std::uint64_t seed = 0;
  std::size_t starts = 8;
  std::size_t max_evals = 2000;  // per start
  std::size_t polish_rounds = 8;  // extra max_evals runs for a start still descending
};

struct FitResult {
  Topology topology = Topology::Bjt;
  TopologyParams params;
  double rms = 0.0;             // A
  double center_rms = 0.0;      // RMS at the centre of the bounds box
  std::size_t evaluations = 0;
  bool converged = false;       // false: no improvement over the box centre
  std::size_t best_start = 0;
};

namespace detail {

struct BoxMap {
  std::vector<double> lo, hi;
  std::vector<bool> log_scale;
  std::vector<std::size_t> free;  // indices of non-pinned parameters

  explicit BoxMap(const FitBounds& b) : lo(b.lo), hi(b.hi) {
    if (lo.size() != hi.size()) throw InputError("bounds lo/hi sizes differ");
    log_scale.resize(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
        throw InputError("bounds box is empty or non-finite at parameter " + std::to_string(i));
      log_scale[i] = lo[i] > 0.0 && hi[i] > 10.0 * lo[i];
      if (lo[i] < hi[i]) free.push_back(i);
    }
  }

  std::vector<double> to_params(const std::vector<double>& u) const {
    std::vector<double> x = lo;
    for (std::size_t j = 0; j < free.size(); ++j) {
      const std::size_t i = free[j];
      x[i] = log_scale[i] ? lo[i] * std::pow(hi[i] / lo[i], u[j]) : lo[i] + (hi[i] - lo[i]) * u[j];
    }
    return x;
  }

  std::vector<double> to_unit(const std::vector<double>& x) const {
    std::vector<double> u(free.size());
    for (std::size_t j = 0; j < free.size(); ++j) {
      const std::size_t i = free[j];
      const double v = std::clamp(x[i], lo[i], hi[i]);
      u[j] = log_scale[i] ? std::log(v / lo[i]) / std::log(hi[i] / lo[i])
                          : (v - lo[i]) / (hi[i] - lo[i]);
    }
    return u;
  }
};

}  // namespace detail

/// RMS of (model - reference) over the reference window; infinite when the
/// parameters are outside the topology's valid region.
inline double fit_rms(const TopologyParams& tp, const SampledSignal& reference) {
  const Window w = reference.window();
  const std::size_t n = w.end - w.begin;
  try {
    std::vector<double> model;
    if (std::holds_alternative<SatInductorParams>(tp)) {
      const auto full = detail::sample_waveform(tp, reference.t0(), reference.dt(), w.end, 1e-11);
      model.assign(full.begin() + static_cast<std::ptrdiff_t>(w.begin), full.end());
    } else {
      model = detail::sample_waveform(tp, reference.time(w.begin), reference.dt(), n, 1e-11);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = model[k] - reference[w.begin + k];
      acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(n));
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

/// Multistart bounded Nelder-Mead least-squares fit of a topology to a
/// reference current. Start 0 is the box centre, the rest are drawn from a
/// SplitMix64 stream; ties between starts go to the lower start index.
inline FitResult fit_to_reference(Topology topology, const SampledSignal& reference,
                                  const FitBounds& bounds, const FitOptions& fo = {},
                                  const std::vector<std::vector<double>>& initial_guesses = {}) {
  const Window w = reference.window();
  if (w.end - w.begin < 2) throw InputError("reference window needs at least two samples");
  for (std::size_t k = w.begin; k < w.end; ++k)
    if (!(reference[k] > 0.0))
      throw InputError("reference must be strictly positive on its window (sample " +
                       std::to_string(k) + ")");
  if (topology == Topology::SatInductor && reference.t0() != 0.0)
    throw InputError("sat-inductor fits need a reference starting at t = 0");

  const detail::BoxMap box(bounds);
  from_vector(topology, box.lo);  // size check

  auto objective = [&](const std::vector<double>& u) {
    return fit_rms(from_vector(topology, box.to_params(u)), reference);
  };

  FitResult best;
  best.topology = topology;
  best.rms = std::numeric_limits<double>::infinity();
  const std::vector<double> center(box.free.size(), 0.5);
  best.center_rms = objective(center);

  nm::Options nmo;
  nmo.max_evals = fo.max_evals;
  const std::size_t n_starts = std::max<std::size_t>(1, fo.starts) + initial_guesses.size();
  std::vector<double> best_u = center;
  for (std::size_t s = 0; s < n_starts; ++s) {
    std::vector<double> u0;
    if (s < initial_guesses.size()) {
      u0 = box.to_unit(initial_guesses[s]);
    } else if (s == initial_guesses.size()) {
      u0 = center;
    } else {
      SplitMix64 rng(derive_seed(fo.seed, s));
      u0.resize(box.free.size());
      for (double& v : u0) v = rng.uniform();
    }
    nm::Result r = nm::minimize(objective, u0, nmo);
    best.evaluations += r.evals;
    // Budget ran out mid-descent: keep going while it still pays.
    for (std::size_t k = 0; k < fo.polish_rounds && !r.converged && r.f > 0.0; ++k) {
      const nm::Result more = nm::minimize(objective, r.x, nmo);
      best.evaluations += more.evals;
      if (!(more.f < r.f)) break;
      const bool stalled = more.f > 0.5 * r.f;
      r = more;
      if (stalled) break;
    }
    if (r.f < best.rms) {
      best.rms = r.f;
      best_u = r.x;
      best.best_start = s;
    }
  }
  best.params = from_vector(topology, box.to_params(best_u));
  best.converged = std::isfinite(best.rms) && (best.rms < best.center_rms || best.rms == 0.0);
  return best;
}

/// Bounds used when none are given, scaled from the reference peak current
/// and window length. Component values the circuit fixes in practice are
/// pinned: V_T, the 5 ohm load, the 10 V resonant supply, the inductor
/// fixture's L0/L_sat/L_diode.
inline FitBounds default_fit_bounds(Topology t, const SampledSignal& reference,
                                    std::size_t branches = 3) {
  const auto w = reference.windowed();
  const double I_pk = *std::max_element(w.begin(), w.end());
  const double T_w = reference.time(reference.window().end - 1);
  switch (t) {
    case Topology::Bjt:
      return {{1e-6 * I_pk, 0.1 * 0.026 / T_w, 0.026, T_w * 1.001},
              {1.0 * I_pk, 100.0 * 0.026 / T_w, 0.026, T_w * 1.001}};
    case Topology::MultiResonant: {
      FitBounds b{{10.0}, {10.0}};
      for (std::size_t i = 0; i < branches; ++i) {
        b.lo.insert(b.lo.end(), {1e-9, 1e-13});
        b.hi.insert(b.hi.end(), {1e-5, 1e-8});
      }
      return b;
    }
    case Topology::Rlc:
      return {{5.0, 1e-12, 1e-10, 0.01 * I_pk * 5.0}, {5.0, 1e-7, 1e-5, 100.0 * I_pk * 5.0}};
    case Topology::SatInductor:
      return {{35e-9, 5e-9, 0.01 / I_pk, 0.01 * I_pk, 5e-9, 1e-3 * I_pk * 40e-9 / T_w},
              {35e-9, 5e-9, 1e3 / I_pk, 10.0 * I_pk, 5e-9, 1e2 * I_pk * 40e-9 / T_w}};
    case Topology::ResonantRing:
      return {{1e-12, 1e-10, 1e-3, 10.0, T_w * 1.001}, {1e-7, 1e-5, 1.0, 10.0, T_w * 1.001}};
  }
  throw InputError("unknown topology");
}

}  // namespace gainswitch
