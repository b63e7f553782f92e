#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gainswitch/gainswitch.hpp"

namespace gainswitch::cli {
namespace {

using ojson = nlohmann::ordered_json;

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

template <class T>
ojson optional_json(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

bool to_stdout(const std::string& path) { return path.empty() || path == "-"; }

class OutFile {
 public:
  explicit OutFile(const std::string& path) {
    if (to_stdout(path)) return;
    file_.open(path);
    if (!file_) throw InputError("cannot open output file " + path);
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::optional<std::string> sidecar_path(const CommonOptions& c) {
  if (!c.sidecar.empty()) return c.sidecar;
  if (c.format != "csv" || to_stdout(c.out)) return std::nullopt;
  std::filesystem::path p(c.out);
  p.replace_extension(".json");
  if (p == std::filesystem::path(c.out)) p = c.out + ".meta.json";
  return p.string();
}

/// Writes a table as CSV (plus sidecar summary) or as one JSON document.
void emit_table(const CommonOptions& c, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& cols, ojson summary) {
  OutFile out(c.out);
  if (c.format == "json") {
    ojson doc;
    doc["columns"] = header;
    ojson rows = ojson::array();
    const std::size_t n = cols.empty() ? 0 : cols.front().size();
    for (std::size_t r = 0; r < n; ++r) {
      ojson row = ojson::array();
      for (const auto& col : cols) row.push_back(number_or_null(col[r]));
      rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    doc["summary"] = std::move(summary);
    out.stream() << doc.dump(2) << '\n';
    return;
  }
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& col : cols) ptrs.push_back(&col);
  io::write_csv(out.stream(), header, ptrs);
  if (const auto side = sidecar_path(c)) {
    std::ofstream s(*side);
    if (!s) throw InputError("cannot open sidecar file " + *side);
    s << summary.dump(2) << '\n';
  }
}

CutoffPolicy cutoff_of(const std::string& s) {
  const auto c = parse_cutoff_policy(s);
  if (!c) throw UsageError("unknown cutoff policy '" + s + "'");
  return *c;
}

Topology topology_of_name(const std::string& s) {
  const auto t = parse_topology(s);
  if (!t) throw UsageError("unknown topology '" + s + "'");
  return *t;
}

std::map<std::string, double> parse_assignments(const std::vector<std::string>& items,
                                                const char* flag) {
  std::map<std::string, double> m;
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError(std::string(flag) + " expects name=value, got '" + it + "'");
    const auto v = io::parse_number(std::string_view(it).substr(eq + 1));
    if (!v) throw UsageError(std::string(flag) + " value for '" + it.substr(0, eq) + "' is not a number");
    m[it.substr(0, eq)] = *v;
  }
  return m;
}

/// Default component values for each topology, sized for a pulse of length T.
TopologyParams default_topology_params(Topology t, const LaserParams& laser, double T,
                                       std::size_t branches) {
  switch (t) {
    case Topology::Bjt: {
      const OptimalProfile prof = make_optimal_profile(laser, T);
      return BjtParams{1.25 * prof.A, 0.026, 0.026 / laser.tau_N, T * 1.001};
    }
    case Topology::MultiResonant: {
      static const std::vector<LcBranch> base{{6.3e-7, 1.6e-11}, {2e-6, 5e-13}, {4e-6, 1e-13}};
      MultiResonantParams p;
      p.V0 = 10.0;
      for (std::size_t i = 0; i < branches; ++i)
        p.branches.push_back(i < base.size() ? base[i] : base.back());
      return p;
    }
    case Topology::Rlc: return RlcParams{5.0, 150e-12, 15e-9, 5.0};
    case Topology::SatInductor: return default_sat_inductor();
    case Topology::ResonantRing: {
      const double C = 10e-12, L = 1e-6;
      return ResonantRingParams{C, L, 0.5, 10.0, kPi * std::sqrt(L * C)};
    }
  }
  throw UsageError("unknown topology");
}

TopologyParams topology_params(Topology t, const LaserParams& laser, double T,
                               std::size_t branches, const std::vector<std::string>& overrides) {
  if (branches == 0) throw UsageError("--branches must be at least 1");
  const TopologyParams def = default_topology_params(t, laser, T, branches);
  std::vector<double> v = to_vector(def);
  const auto names = parameter_names(t, branches);
  for (const auto& [name, value] : parse_assignments(overrides, "--param")) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
      throw UsageError("unknown parameter '" + name + "' for topology " + std::string(to_string(t)));
    v[static_cast<std::size_t>(it - names.begin())] = value;
  }
  return from_vector(t, v);
}

ojson params_json(const TopologyParams& tp) {
  const Topology t = topology_of(tp);
  const auto v = to_vector(tp);
  const auto names = parameter_names(t, (v.size() - 1) / 2);
  ojson j;
  for (std::size_t i = 0; i < v.size(); ++i) j[names[i]] = v[i];
  return j;
}

/// Laser drive built from a topology current; the laser diode blocks reverse
/// current, so negative excursions are dropped.
DriveWaveform topology_drive(const TopologyParams& tp, double T, double dt) {
  return std::visit(
      [&](const auto& p) -> DriveWaveform {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BjtParams>) {
          p.validate();
          return DriveWaveform::from_function(
              [p](double t) { return bjt_current(p, std::clamp(t, 0.0, p.t_on)); }, p.t_on);
        } else if constexpr (std::is_same_v<P, MultiResonantParams>) {
          const double t_off = multi_resonant_turn_off(p);
          return DriveWaveform::from_function(
              [p](double t) { return std::max(0.0, multi_resonant_current(p, t)); }, t_off);
        } else if constexpr (std::is_same_v<P, RlcParams>) {
          p.validate();
          return DriveWaveform::from_function(
              [p](double t) { return std::max(0.0, rlc_step_response(p, t)); }, T);
        } else if constexpr (std::is_same_v<P, SatInductorParams>) {
          const SampledSignal s = saturating_inductor_current(p, T, dt);
          return DriveWaveform::from_samples(s, T);
        } else {
          p.validate();
          return DriveWaveform::from_function(
              [p](double t) { return std::max(0.0, resonant_ring_current(p, t)); }, p.t_off);
        }
      },
      tp);
}

void check_positive(double v, const char* flag) {
  if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(flag) + " must be positive");
}

std::vector<double> parse_grid(const std::string& text, const char* flag) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError(std::string(flag) + " expects start:stop:count");
  const auto a = io::parse_number(parts[0]);
  const auto b = io::parse_number(parts[1]);
  const auto n = io::parse_number(parts[2]);
  if (!a || !b || !n || *n != std::floor(*n) || *n < 2)
    throw UsageError(std::string(flag) + " expects numeric start:stop and an integer count >= 2");
  const auto count = static_cast<std::size_t>(*n);
  if (!(*a > 0.0)) throw UsageError(std::string(flag) + " start must be positive");
  if (!(*b > *a)) throw UsageError(std::string(flag) + " stop must exceed start");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = i + 1 == count ? *b : *a + (*b - *a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

}  // namespace

// --- optimal ----------------------------------------------------------------------

int cmd_optimal(const CommonOptions& c, const OptimalOptions& o) {
  check_positive(o.T, "--T");
  const LaserParams laser = io::resolve_laser(c.laser);
  const OptimalProfile prof = make_optimal_profile(laser, o.T);
  const double dt_req = o.dt.value_or(o.T / 1000.0);
  check_positive(dt_req, "--dt");
  const auto n = std::max<long long>(1, std::llround(o.T / dt_req));

  std::vector<double> t(static_cast<std::size_t>(n) + 1), I(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = k + 1 == t.size() ? o.T : o.T * static_cast<double>(k) / static_cast<double>(n);
    I[k] = optimal_current(prof, t[k]);
  }

  ojson s;
  s["laser"] = c.laser;
  s["T_s"] = o.T;
  s["A_A"] = prof.A;
  s["I_th_A"] = threshold_current(laser);
  s["N_th_m3"] = threshold_density(laser);
  s["I_peak_A"] = peak_current(prof);
  s["J_A2s"] = energy_loss(prof);
  s["J_min_A2s"] = energy_loss_limit(laser);
  if (o.slew_max) {
    check_positive(*o.slew_max, "--slew-max");
    s["slew_max_A_per_s"] = *o.slew_max;
    s["B"] = slew_parameter(laser, *o.slew_max);
    const double T_min = min_duration_for_slew(laser, *o.slew_max);
    s["T_min_s"] = T_min;
    s["T_min_conservative_s"] = conservative_duration_for_slew(laser, *o.slew_max);
    s["slew_feasible"] = o.T >= T_min;
    s["max_slope_A_per_s"] = optimal_current_slope(prof, o.T);
  }
  emit_table(c, {"t_s", "I_A"}, {t, I}, std::move(s));
  return kOk;
}

// --- simulate ---------------------------------------------------------------------

int cmd_simulate(const CommonOptions& c, const SimulateOptions& o) {
  const LaserParams laser = io::resolve_laser(c.laser);
  const CutoffPolicy policy = cutoff_of(o.cutoff);
  check_positive(o.dt, "--dt");
  if (!(o.initial_N >= 0.0) || !(o.initial_S >= 0.0))
    throw UsageError("--initial-N and --initial-S must be >= 0");
  const double T = o.T.value_or(2.5 * laser.tau_N);
  check_positive(T, "--T");

  DriveWaveform drive;
  double drive_end = 0.0;
  std::size_t trace_clamped = 0;
  if (o.drive == "optimal") {
    drive = optimal_drive(make_optimal_profile(laser, T), policy);
    drive_end = T;
  } else if (o.drive == "zero") {
    drive = DriveWaveform::zero();
  } else if (o.drive == "trace") {
    if (o.trace.empty()) throw UsageError("--drive trace needs --trace <file>");
    io::TraceOptions to;
    to.column = o.trace_column;
    const io::Trace tr = io::read_trace_file(o.trace, to);
    trace_clamped = tr.clamped;
    drive = DriveWaveform::from_samples(tr.signal);
    drive_end = drive.cutoff();
  } else if (o.drive == "topology") {
    if (o.topology.empty()) throw UsageError("--drive topology needs --topology <name>");
    const Topology topo = topology_of_name(o.topology);
    drive = topology_drive(topology_params(topo, laser, T, o.branches, o.params), T, o.dt);
    drive_end = std::isfinite(drive.cutoff()) ? drive.cutoff() : T;
  } else {
    throw UsageError("unknown drive '" + o.drive + "'");
  }
  if (policy == CutoffPolicy::AtT && o.drive != "optimal") drive = drive.with_cutoff(T);

  const double t_end = o.t_end.value_or((o.drive == "zero" ? 10.0 : 5.0) * laser.tau_N + drive_end);
  check_positive(t_end, "--t-end");

  SimulationOptions so;
  so.initial = LaserState{o.initial_N, o.initial_S};
  so.cut_drive_at_first_peak = policy == CutoffPolicy::AtSPeak;
  const Trajectory tr = simulate(laser, drive, t_end, o.dt, so);

  std::vector<double> t(tr.size()), N(tr.size()), S(tr.size()), I(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    t[k] = tr.time(k);
    N[k] = tr.samples[k].N;
    S[k] = tr.samples[k].S;
    I[k] = tr.samples[k].I;
  }

  ojson warnings = ojson::array();
  const SampledSignal photons = tr.photon_density();
  ojson ev;
  ev["t_th_s"] = optional_json(tr.t_threshold);
  ev["t_peak_s"] = nullptr;
  ev["S_peak_m3"] = nullptr;
  ev["rho_per_s"] = nullptr;
  ev["fwhm_s"] = nullptr;
  ev["pulse_count"] = 0;
  if (!tr.t_threshold) {
    warnings.push_back("no lasing: carrier density never reached threshold");
  } else {
    if (tr.peak) {
      ev["t_peak_s"] = tr.peak->t;
      ev["S_peak_m3"] = tr.peak->S;
    }
    try {
      ev["rho_per_s"] = rho(photons);
      ev["pulse_count"] = pulse_count(photons);
      ev["fwhm_s"] = fwhm(photons);
    } catch (const std::exception& e) {
      warnings.push_back(e.what());
    }
  }
  ev["clamp_count"] = tr.clamp_count;
  ev["drive_cutoff_s"] = optional_json(tr.drive_cutoff);
  if (tr.clamp_count > 0)
    warnings.push_back("negative densities clamped to zero in " + std::to_string(tr.clamp_count) +
                       " samples");
  if (trace_clamped > 0)
    warnings.push_back("negative trace samples clamped: " + std::to_string(trace_clamped));
  for (const auto& w : warnings) std::cerr << "warning: " << w.get<std::string>() << '\n';

  ojson s;
  s["laser"] = c.laser;
  s["drive"] = o.drive;
  s["cutoff"] = std::string(to_string(policy));
  s["T_s"] = T;
  s["t_end_s"] = t_end;
  s["dt_s"] = o.dt;
  s["events"] = std::move(ev);
  s["warnings"] = std::move(warnings);
  emit_table(c, {"t_s", "N_m3", "S_m3", "I_A"}, {t, N, S, I}, std::move(s));
  return kOk;
}

// --- sweep ------------------------------------------------------------------------

int cmd_sweep(const CommonOptions& c, const SweepCliOptions& o) {
  const LaserParams laser = io::resolve_laser(c.laser);
  const CutoffPolicy policy = cutoff_of(o.cutoff);
  if (o.grid.empty() == o.grid_tau.empty())
    throw UsageError("give exactly one of --grid or --grid-tau");
  check_positive(o.dt, "--dt");
  std::vector<double> grid = o.grid.empty() ? parse_grid(o.grid_tau, "--grid-tau")
                                            : parse_grid(o.grid, "--grid");
  if (!o.grid_tau.empty())
    for (double& g : grid) g *= laser.tau_N;

  SweepOptions so;
  so.threads = std::max(1u, o.threads);
  so.efficiency.dt_out = o.dt;
  const SweepResult r = sweep_duration(laser, grid, policy, so);

  const double nan = std::nan("");
  std::vector<double> eta(r.size()), rho_col(r.size());
  std::size_t failed = 0;
  ojson errors = ojson::array();
  for (std::size_t i = 0; i < r.size(); ++i) {
    eta[i] = r.eta[i].value_or(nan);
    rho_col[i] = r.rho[i].value_or(nan);
    if (!r.errors[i].empty()) {
      ++failed;
      std::cerr << "warning: T = " << io::format_number(r.T_grid[i]) << " s: " << r.errors[i] << '\n';
      errors.push_back({{"T_s", r.T_grid[i]}, {"error", r.errors[i]}});
    }
  }
  ojson s;
  s["laser"] = c.laser;
  s["cutoff"] = std::string(to_string(policy));
  s["points"] = r.size();
  s["failed"] = failed;
  s["errors"] = std::move(errors);
  emit_table(c, {"T_s", "J_A2s", "I_peak_A", "eta", "rho_per_s"},
             {r.T_grid, r.J, r.I_peak, eta, rho_col}, std::move(s));
  if (failed == r.size()) {
    std::cerr << "error: every sweep point failed\n";
    return kRuntimeError;
  }
  return kOk;
}

// --- metric -----------------------------------------------------------------------

int cmd_metric(const CommonOptions& c, const MetricOptions& o) {
  if (!(o.rel_threshold > 0.0 && o.rel_threshold < 1.0))
    throw UsageError("--rel-threshold must lie in (0, 1)");
  io::TraceOptions to;
  to.column = o.column;
  to.clamp_negative = o.clamp_negative;
  const io::Trace tr = io::read_trace_file(o.trace, to);
  if (tr.clamped > 0)
    std::cerr << "warning: clamped " << tr.clamped << " negative samples to zero\n";

  SampledSignal sig = tr.signal;
  if (o.window_start || o.window_end) {
    const double a = o.window_start.value_or(sig.time(0));
    const double b = o.window_end.value_or(sig.time(sig.size() - 1));
    if (!(b > a)) throw UsageError("--window-end must exceed --window-start");
    sig = sig.with_time_window(a, b);
  }
  const Window w = sig.window();
  const double r = rho(sig);
  double width = std::nan("");
  try {
    width = fwhm(sig);
  } catch (const UnboundedPulseError& e) {
    std::cerr << "warning: " << e.what() << '\n';
  }
  const std::size_t pulses = pulse_count(sig, o.rel_threshold);

  std::vector<std::pair<std::string, double>> rows{
      {"rho_per_s", r},
      {"rho_per_ns", r * 1e-9},
      {"fwhm_s", width},
      {"fwhm_ps", width * 1e12},
      {"window_start_s", sig.time(w.begin)},
      {"window_end_s", sig.time(w.end - 1)},
      {"samples", static_cast<double>(w.end - w.begin)},
      {"pulse_count", static_cast<double>(pulses)},
      {"clamped", static_cast<double>(tr.clamped)},
  };
  OutFile out(c.out);
  if (c.format == "json") {
    ojson j;
    for (const auto& [k, v] : rows) j[k] = number_or_null(v);
    out.stream() << j.dump(2) << '\n';
  } else {
    out.stream() << "metric,value\n";
    for (const auto& [k, v] : rows) out.stream() << k << ',' << io::format_number(v) << '\n';
  }
  return kOk;
}

// --- circuit ----------------------------------------------------------------------

int cmd_circuit(const CommonOptions& c, const CircuitOptions& o) {
  const Topology topo = topology_of_name(o.topology);
  const LaserParams laser = io::resolve_laser(c.laser);
  check_positive(o.T, "--T");
  const double dt = o.dt.value_or(o.T / 500.0);
  check_positive(dt, "--dt");
  const double t_end = o.t_end.value_or(o.T);
  check_positive(t_end, "--t-end");
  if (o.reference != "optimal" && o.reference != "self")
    throw UsageError("--reference must be optimal or self");

  const TopologyParams tp = topology_params(topo, laser, o.T, o.branches, o.params);
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = dt * static_cast<double>(k);
  const std::vector<double> I = topology_waveform(tp, dt, n);

  // Reference current; its window covers the samples the fit is scored on.
  std::vector<double> ref(n);
  Window win{0, n};
  if (o.reference == "optimal") {
    const OptimalProfile prof = make_optimal_profile(laser, o.T);
    std::size_t last = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (t[k] <= o.T * (1.0 + 1e-12)) last = k;
      ref[k] = optimal_current(prof, std::min(t[k], o.T));
    }
    win = {0, last + 1};
  } else {
    ref = I;
    win = {1, n};
  }

  ojson s;
  s["topology"] = std::string(to_string(topo));
  s["params"] = params_json(tp);
  s["reference"] = o.reference;
  s["T_s"] = o.T;
  s["dt_s"] = dt;
  s["peak_A"] = *std::max_element(I.begin(), I.end());
  if (const auto* mr = std::get_if<MultiResonantParams>(&tp)) {
    try {
      s["turn_off_s"] = multi_resonant_turn_off(*mr);
    } catch (const std::exception& e) {
      s["turn_off_s"] = nullptr;
    }
  }
  if (const auto* rl = std::get_if<RlcParams>(&tp)) {
    const Damping d = rlc_damping(*rl);
    s["damping"] = d == Damping::Underdamped ? "underdamped"
                   : d == Damping::Critical  ? "critical"
                                             : "overdamped";
  }

  std::vector<std::string> header{"t_s", "I_A", "I_ref_A"};
  std::vector<std::vector<double>> cols{t, I, ref};

  if (o.fit) {
    const SampledSignal reference = SampledSignal(dt, ref).with_window(win);
    FitBounds bounds = default_fit_bounds(topo, reference, o.branches);
    const auto names = parameter_names(topo, o.branches);
    for (const auto& item : o.bounds) {
      const auto eq = item.find('=');
      const auto colon = item.find(':', eq == std::string::npos ? 0 : eq);
      if (eq == std::string::npos || colon == std::string::npos)
        throw UsageError("--bound expects name=lo:hi, got '" + item + "'");
      const std::string name = item.substr(0, eq);
      const auto lo = io::parse_number(std::string_view(item).substr(eq + 1, colon - eq - 1));
      const auto hi = io::parse_number(std::string_view(item).substr(colon + 1));
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw UsageError("unknown parameter '" + name + "' in --bound");
      if (!lo || !hi || *lo > *hi) throw UsageError("--bound " + name + ": need numeric lo <= hi");
      const auto idx = static_cast<std::size_t>(it - names.begin());
      bounds.lo[idx] = *lo;
      bounds.hi[idx] = *hi;
    }
    FitOptions fo;
    fo.seed = c.seed;
    const FitResult fr = fit_to_reference(topo, reference, bounds, fo);
    const auto& rv = reference.values();
    const double ref_peak = *std::max_element(rv.begin() + static_cast<std::ptrdiff_t>(win.begin),
                                              rv.begin() + static_cast<std::ptrdiff_t>(win.end));

    std::ostringstream rep;
    rep << "topology = " << to_string(topo) << '\n';
    const auto fv = to_vector(fr.params);
    for (std::size_t i = 0; i < fv.size(); ++i)
      rep << "param." << names[i] << " = " << io::format_number(fv[i]) << '\n';
    rep << "rms_A = " << io::format_number(fr.rms) << '\n';
    rep << "rms_rel = " << io::format_number(fr.rms / ref_peak) << '\n';
    rep << "converged = " << (fr.converged ? "true" : "false") << '\n';
    rep << "evaluations = " << fr.evaluations << '\n';
    rep << "seed = " << c.seed << '\n';

    ojson f;
    f["params"] = params_json(fr.params);
    f["rms_A"] = fr.rms;
    f["rms_rel"] = fr.rms / ref_peak;
    f["converged"] = fr.converged;
    f["evaluations"] = fr.evaluations;
    f["best_start"] = fr.best_start;
    f["seed"] = c.seed;
    s["fit"] = std::move(f);

    header.push_back("I_fit_A");
    cols.push_back(topology_waveform(fr.params, dt, n));

    if (!o.report.empty()) {
      std::ofstream r(o.report);
      if (!r) throw InputError("cannot open report file " + o.report);
      r << rep.str();
    } else if (c.format == "csv") {
      (to_stdout(c.out) ? std::cerr : std::cout) << rep.str();
    }
    if (!fr.converged) std::cerr << "warning: fit did not improve on the bounds-box centre\n";
  }
  emit_table(c, header, cols, std::move(s));
  return kOk;
}

}  // namespace gainswitch::cli
