#pragma once

// File formats: laser parameter fixtures (flat JSON), uniformly sampled trace
// CSVs, and shortest round-trip number formatting for byte-stable output.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "gainswitch/errors.hpp"
#include "gainswitch/laser_model.hpp"
#include "gainswitch/signal.hpp"

namespace gainswitch::io {

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// --- laser parameter fixtures ---------------------------------------------------

inline constexpr std::string_view kDefaultFixture = "default-1W-850nm";

inline LaserParams laser_params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("laser parameter document must be a JSON object");
  LaserParams p;
  struct Field {
    const char* name;
    double LaserParams::*member;
  };
  static constexpr std::array<Field, 8> fields{{{"tau_N", &LaserParams::tau_N},
                                                {"tau_P", &LaserParams::tau_P},
                                                {"Gamma", &LaserParams::Gamma},
                                                {"beta", &LaserParams::beta},
                                                {"g0", &LaserParams::g0},
                                                {"N_t", &LaserParams::N_t},
                                                {"eps", &LaserParams::eps},
                                                {"V", &LaserParams::V}}};
  for (const auto& [key, value] : j.items()) {
    if (key == "e") {
      if (!value.is_number() || value.get<double>() != kElementaryCharge)
        throw InputError("laser parameter e is fixed at 1.602176634e-19 C");
      continue;
    }
    bool known = false;
    for (const auto& f : fields) known = known || key == f.name;
    if (!known) throw InputError("unknown laser parameter key '" + key + "'");
    if (!value.is_number()) throw InputError("laser parameter '" + key + "' must be a number");
  }
  for (const auto& f : fields) {
    if (!j.contains(f.name)) throw InputError(std::string("missing laser parameter '") + f.name + "'");
    p.*(f.member) = j.at(f.name).get<double>();
  }
  p.validate();
  return p;
}

inline nlohmann::ordered_json laser_params_to_json(const LaserParams& p) {
  nlohmann::ordered_json j;
  j["tau_N"] = p.tau_N;
  j["tau_P"] = p.tau_P;
  j["Gamma"] = p.Gamma;
  j["beta"] = p.beta;
  j["g0"] = p.g0;
  j["N_t"] = p.N_t;
  j["eps"] = p.eps;
  j["V"] = p.V;
  return j;
}

inline LaserParams load_laser_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open laser parameter file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return laser_params_from_json(j);
}

/// Fixture directory: $GAINSWITCH_FIXTURES if set, else the build-time default.
inline std::filesystem::path fixture_dir() {
  if (const char* env = std::getenv("GAINSWITCH_FIXTURES"); env && *env) return env;
#ifdef GAINSWITCH_FIXTURE_DIR
  return GAINSWITCH_FIXTURE_DIR;
#else
  return "fixtures";
#endif
}

/// `source` is either a path to a JSON file or a fixture name looked up as
/// <fixture_dir>/<name>.json.
inline LaserParams resolve_laser(const std::string& source) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(source, ec)) return load_laser_params(source);
  const fs::path candidate = fixture_dir() / (source + ".json");
  if (fs::is_regular_file(candidate, ec)) return load_laser_params(candidate);
  throw InputError("laser '" + source + "' is neither a file nor a fixture in " +
                   fixture_dir().string());
}

// --- CSV ---------------------------------------------------------------------------

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return out;
}

/// A parsed CSV with a header row and all-numeric data rows ("NA" -> NaN).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw InputError("CSV has no column '" + std::string(name) + "'");
  }
};

inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw InputError("CSV is empty");
  t.header = split_csv_line(line);
  if (t.header.size() < 2) throw InputError("CSV needs at least two columns");
  for (const auto& h : t.header)
    if (parse_number(h)) throw InputError("CSV header row is required (found numeric header)");
  t.columns.assign(t.header.size(), {});
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != t.header.size())
      throw InputError("CSV data row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(t.header.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (fields[c] == "NA") {
        t.columns[c].push_back(std::nan(""));
        continue;
      }
      const auto v = parse_number(fields[c]);
      if (!v)
        throw InputError("CSV data row " + std::to_string(row) + ", column '" + t.header[c] +
                         "': not a number");
      t.columns[c].push_back(*v);
    }
    ++row;
  }
  return t;
}

struct TraceOptions {
  std::string column;           // empty: second column
  bool clamp_negative = false;  // otherwise negative samples are an error
};

struct Trace {
  SampledSignal signal;
  std::size_t clamped = 0;
};

/// Reads a trace: first column time in seconds, uniformly spaced to rel. 1e-6.
inline Trace read_trace(std::istream& in, const TraceOptions& opt = {}) {
  const Table t = read_table(in);
  const std::size_t col = opt.column.empty() ? 1 : t.column_index(opt.column);
  const auto& time = t.columns[0];
  const auto& val = t.columns[col];
  if (time.size() < 2) throw InputError("trace needs at least two samples");
  const double dt = time[1] - time[0];
  if (!(dt > 0.0)) throw InputError("trace time is not increasing at row 1");
  for (std::size_t k = 1; k < time.size(); ++k) {
    const double expect = time[0] + dt * static_cast<double>(k);
    if (!(std::abs(time[k] - expect) <= 1e-6 * dt))
      throw InputError("non-uniform sampling at row " + std::to_string(k));
  }
  for (std::size_t k = 0; k < val.size(); ++k)
    if (!std::isfinite(val[k])) throw InputError("non-finite sample at row " + std::to_string(k));
  Trace tr;
  if (opt.clamp_negative) {
    auto [sig, n] = SampledSignal::clamped(dt, val, time[0]);
    tr.signal = std::move(sig);
    tr.clamped = n;
  } else {
    for (std::size_t k = 0; k < val.size(); ++k)
      if (val[k] < 0.0)
        throw InputError("negative sample at row " + std::to_string(k) +
                         " (use --clamp-negative to clamp)");
    tr.signal = SampledSignal(dt, val, time[0]);
  }
  return tr;
}

inline Trace read_trace_file(const std::filesystem::path& path, const TraceOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace file " + path.string());
  return read_trace(in, opt);
}

/// Writes a header and equal-length numeric columns.
inline void write_csv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<const std::vector<double>*>& columns) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  const std::size_t n = columns.empty() ? 0 : columns.front()->size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << format_number((*columns[c])[r]);
    out << '\n';
  }
}

}  // namespace gainswitch::io
