#pragma once

// Pulse-shape metrics on uniformly sampled optical traces.
//
// rho = max(y) / (dt * sum(y)) over the signal's window, in 1/s. It is
// scale-invariant and cannot increase under convolution with a nonnegative
// kernel, so it can be compared across band-limited instruments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gainswitch/errors.hpp"
#include "gainswitch/signal.hpp"

namespace gainswitch {

/// Index (into the full record) of the first maximum inside the window.
inline std::size_t peak_index(const SampledSignal& s) {
  const auto w = s.windowed();
  if (w.empty()) throw UndefinedMetricError("empty signal");
  const auto it = std::max_element(w.begin(), w.end());  // first of equal maxima
  return s.window().begin + static_cast<std::size_t>(it - w.begin());
}

namespace detail {
// Neumaier-compensated sum; keeps rho scale invariant to a few ulps.
inline double compensated_sum(std::span<const double> v) {
  double sum = 0.0, c = 0.0;
  for (double x : v) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}
}  // namespace detail

/// max y / (dt sum y) over the window, in 1/s.
inline double rho(const SampledSignal& s) {
  const auto w = s.windowed();
  const double peak = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
  if (!(peak > 0.0)) throw UndefinedMetricError("rho is undefined for an all-zero window");
  return peak / (s.dt() * detail::compensated_sum(w));
}

/// Full width at half maximum, with linear interpolation at both crossings.
///
/// The rising crossing is the first one in the window and the falling
/// crossing the last one, so multi-peaked traces report their outer width.
inline double fwhm(const SampledSignal& s) {
  const auto w = s.windowed();
  if (w.size() < 3) throw UnboundedPulseError("unbounded pulse: too few samples");
  const double peak = *std::max_element(w.begin(), w.end());
  if (!(peak > 0.0)) throw UndefinedMetricError("FWHM is undefined for an all-zero window");
  const double half = 0.5 * peak;

  std::size_t rise = w.size();
  for (std::size_t k = 1; k < w.size(); ++k) {
    if (w[k - 1] < half && w[k] >= half) {
      rise = k;
      break;
    }
  }
  std::size_t fall = w.size();
  for (std::size_t k = w.size() - 1; k >= 1; --k) {
    if (w[k - 1] >= half && w[k] < half) {
      fall = k;
      break;
    }
  }
  if (rise == w.size() || fall == w.size() || fall < rise)
    throw UnboundedPulseError("unbounded pulse: signal does not cross half maximum on both sides");

  const double t_rise = (static_cast<double>(rise - 1) + (half - w[rise - 1]) / (w[rise] - w[rise - 1]));
  const double t_fall = (static_cast<double>(fall - 1) + (w[fall - 1] - half) / (w[fall - 1] - w[fall]));
  return (t_fall - t_rise) * s.dt();
}

/// Riemann approximation of (h * f)(t): dt * sum_k f[k] h[n-k].
/// Output has size(f) + size(h) - 1 samples and ignores input windows.
inline SampledSignal convolve(const SampledSignal& f, const SampledSignal& h) {
  if (std::abs(f.dt() - h.dt()) > 1e-12 * std::max(f.dt(), h.dt()))
    throw InputError("convolve: sample intervals differ");
  if (f.empty() || h.empty()) throw InputError("convolve: empty input");
  const auto& a = f.values();
  const auto& b = h.values();
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  for (double& v : out) v *= f.dt();
  return SampledSignal(f.dt(), std::move(out), f.t0() + h.t0());
}

/// Number of disjoint runs where the signal is >= rel_threshold * peak.
inline std::size_t pulse_count(const SampledSignal& s, double rel_threshold = 0.1) {
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0))
    throw DomainError("pulse_count: rel_threshold must be in (0, 1)");
  const auto w = s.windowed();
  if (w.empty()) return 0;
  const double peak = *std::max_element(w.begin(), w.end());
  if (!(peak > 0.0)) return 0;
  const double level = rel_threshold * peak;
  std::size_t count = 0;
  bool inside = false;
  for (double v : w) {
    const bool above = v >= level;
    if (above && !inside) ++count;
    inside = above;
  }
  return count;
}

}  // namespace gainswitch
