#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gainswitch/errors.hpp"

namespace gainswitch {

/// Half-open sample index range [begin, end).
struct Window {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Uniformly sampled nonnegative signal, sample k at time t0 + k*dt.
///
/// An optional window restricts which samples metrics look at; by default the
/// whole record is used.
class SampledSignal {
 public:
  SampledSignal() = default;

  SampledSignal(double dt, std::vector<double> values, double t0 = 0.0)
      : dt_(dt), t0_(t0), values_(std::move(values)) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw InputError("sample interval must be positive");
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!std::isfinite(values_[k]))
        throw InputError("non-finite sample at index " + std::to_string(k));
      if (values_[k] < 0.0)
        throw InputError("negative sample at index " + std::to_string(k));
    }
  }

  /// Builds a signal, replacing negative samples by zero. Returns the signal
  /// and the number of samples that were clamped.
  static std::pair<SampledSignal, std::size_t> clamped(double dt, std::vector<double> values,
                                                       double t0 = 0.0) {
    std::size_t n = 0;
    for (double& v : values) {
      if (v < 0.0) {
        v = 0.0;
        ++n;
      }
    }
    return {SampledSignal(dt, std::move(values), t0), n};
  }

  double dt() const noexcept { return dt_; }
  double t0() const noexcept { return t0_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * dt_; }

  Window window() const noexcept { return window_.value_or(Window{0, values_.size()}); }
  bool has_window() const noexcept { return window_.has_value(); }

  SampledSignal with_window(Window w) const {
    if (!(w.begin < w.end) || w.end > values_.size())
      throw InputError("window [" + std::to_string(w.begin) + ", " + std::to_string(w.end) +
                       ") is invalid for " + std::to_string(values_.size()) + " samples");
    SampledSignal s = *this;
    s.window_ = w;
    return s;
  }

  /// Window covering samples whose time lies in [t_begin, t_end].
  SampledSignal with_time_window(double t_begin, double t_end) const {
    const auto lo = static_cast<long long>(std::ceil((t_begin - t0_) / dt_ - 1e-9));
    const auto hi = static_cast<long long>(std::floor((t_end - t0_) / dt_ + 1e-9));
    const long long n = static_cast<long long>(values_.size());
    const long long b = std::max(0LL, lo);
    const long long e = std::min(n, hi + 1);
    if (b >= e) throw InputError("time window contains no samples");
    return with_window({static_cast<std::size_t>(b), static_cast<std::size_t>(e)});
  }

  std::span<const double> windowed() const {
    const Window w = window();
    return std::span<const double>(values_).subspan(w.begin, w.end - w.begin);
  }

 private:
  double dt_ = 1.0;
  double t0_ = 0.0;
  std::vector<double> values_;
  std::optional<Window> window_;
};

}  // namespace gainswitch
