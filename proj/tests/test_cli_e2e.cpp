#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "gainswitch/io.hpp"
#include "gainswitch/optimal_control.hpp"

using namespace gainswitch;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path tmp_dir() {
  const fs::path d = GAINSWITCH_TEST_TMP;
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const fs::path base = tmp_dir() / ("run" + std::to_string(counter++));
  const std::string cmd = env + " '" + std::string(GAINSWITCH_CLI) + "' " + args + " > '" +
                          base.string() + ".out' 2> '" + base.string() + ".err'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(base.string() + ".out");
  r.err = slurp(base.string() + ".err");
  return r;
}

std::string path(const std::string& name) { return (tmp_dir() / name).string(); }

nlohmann::json read_json(const std::string& p) { return nlohmann::json::parse(slurp(p)); }

io::Table read_csv(const std::string& p) {
  std::ifstream in(p);
  return io::read_table(in);
}

io::Table parse_csv(const std::string& text) {
  std::istringstream in(text);
  return io::read_table(in);
}

void write_file(const std::string& p, const std::string& text) { std::ofstream(p) << text; }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const LaserParams P = default_laser();

}  // namespace

// --- optimal ------------------------------------------------------------------------

TEST(CliOptimal, LastRowIsPeakCurrent) {
  const auto r = run("optimal --T 5e-9 --out " + path("opt.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto tab = read_csv(path("opt.csv"));
  EXPECT_EQ(tab.header, (std::vector<std::string>{"t_s", "I_A"}));
  EXPECT_EQ(tab.columns[0].back(), 5e-9);
  const double peak = peak_current(make_optimal_profile(P, 5e-9));
  EXPECT_LT(rel(tab.columns[1].back(), peak), 1e-9);
  const auto side = read_json(path("opt.json"));
  for (const char* k : {"A_A", "I_peak_A", "J_A2s", "J_min_A2s"}) EXPECT_TRUE(side.contains(k)) << k;
  EXPECT_LT(rel(side["I_peak_A"].get<double>(), peak), 1e-15);
}

TEST(CliOptimal, SlewLimitAddsMinimumDuration) {
  const auto r = run("optimal --T 5e-9 --slew-max 1e8 --out " + path("opt_slew.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto side = read_json(path("opt_slew.json"));
  EXPECT_EQ(side["T_min_s"].get<double>(), min_duration_for_slew(P, 1e8));
  EXPECT_EQ(side["T_min_conservative_s"].get<double>(), conservative_duration_for_slew(P, 1e8));
}

TEST(CliOptimal, InfeasibleSlewIsRuntimeError) {
  const auto r = run("optimal --T 5e-9 --slew-max 1e6");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no finite duration satisfies the slew limit"), std::string::npos);
}

TEST(CliOptimal, NonPositiveDurationIsUsageError) {
  EXPECT_EQ(run("optimal --T 0").code, 2);
  EXPECT_EQ(run("optimal --T -1e-9").code, 2);
  EXPECT_EQ(run("optimal").code, 2);
  EXPECT_EQ(run("optimal --T 5e-9 --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(CliOptimal, JsonFormat) {
  const auto r = run("optimal --T 5e-9 --dt 1e-9 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["rows"].size(), 6u);
  EXPECT_EQ(j["columns"][1], "I_A");
  EXPECT_TRUE(j["summary"].contains("J_A2s"));
}

// --- simulate -----------------------------------------------------------------------

TEST(CliSimulate, ZeroDriveIsAllZero) {
  const auto r = run("simulate --drive zero --t-end 2e-9 --out " + path("zero.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto tab = read_csv(path("zero.csv"));
  EXPECT_EQ(tab.header, (std::vector<std::string>{"t_s", "N_m3", "S_m3", "I_A"}));
  for (std::size_t c = 1; c < 4; ++c)
    for (double v : tab.columns[c]) EXPECT_EQ(v, 0.0);
  const auto ev = read_json(path("zero.json"))["events"];
  EXPECT_EQ(ev["pulse_count"], 0);
  EXPECT_TRUE(ev["t_th_s"].is_null());
}

TEST(CliSimulate, OptimalDriveSinglePulse) {
  const auto r = run("simulate --drive optimal --T 5e-9 --cutoff at-S-peak --out " + path("sim.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ev = read_json(path("sim.json"))["events"];
  EXPECT_EQ(ev["pulse_count"], 1);
  EXPECT_LT(ev["t_th_s"].get<double>(), ev["t_peak_s"].get<double>());
  EXPECT_GT(ev["rho_per_s"].get<double>(), 0.0);
  EXPECT_GT(ev["fwhm_s"].get<double>(), 0.0);
  EXPECT_EQ(ev["clamp_count"], 0);
}

TEST(CliSimulate, NoCutoffAfterpulses) {
  const auto r = run("simulate --T 16e-9 --cutoff none --out " + path("sim_none.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GE(read_json(path("sim_none.json"))["events"]["pulse_count"].get<int>(), 2);
}

TEST(CliSimulate, NoLasingWarnsWithNullEvents) {
  const auto r = run("simulate --T 2e-9 --cutoff at-T --out " + path("sim_dark.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("no lasing"), std::string::npos);
  const auto ev = read_json(path("sim_dark.json"))["events"];
  EXPECT_TRUE(ev["t_th_s"].is_null());
  EXPECT_TRUE(ev["rho_per_s"].is_null());
}

TEST(CliSimulate, TraceDriveReproducesOptimalRun) {
  ASSERT_EQ(run("optimal --T 5e-9 --dt 1e-12 --out " + path("drive.csv")).code, 0);
  const auto r = run("simulate --drive trace --trace " + path("drive.csv") + " --out " +
                     path("sim_trace.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ev = read_json(path("sim_trace.json"))["events"];
  EXPECT_EQ(ev["pulse_count"], 1);
}

TEST(CliSimulate, TopologyDrive) {
  const auto r = run("simulate --drive topology --topology rlc --out " + path("sim_rlc.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(read_json(path("sim_rlc.json"))["events"]["t_th_s"].is_null());
}

TEST(CliSimulate, FileErrorsExitOne) {
  EXPECT_EQ(run("simulate --drive trace --trace /nonexistent/trace.csv").code, 1);
  EXPECT_EQ(run("simulate --laser /nonexistent/laser.json --drive zero").code, 1);
  EXPECT_EQ(run("simulate --drive trace").code, 2);
  EXPECT_EQ(run("simulate --drive sideways").code, 2);
}

TEST(CliSimulate, OutputRoundTripsThroughTraceLoader) {
  ASSERT_EQ(run("simulate --T 4e-9 --out " + path("rt.csv")).code, 0);
  io::TraceOptions o;
  o.column = "S_m3";
  const auto tr = io::read_trace_file(path("rt.csv"), o);
  const auto tab = read_csv(path("rt.csv"));
  for (std::size_t k = 0; k < tr.signal.size(); ++k) EXPECT_EQ(tr.signal[k], tab.columns[2][k]);
}

// --- sweep --------------------------------------------------------------------------

TEST(CliSweep, TwoPointGrid) {
  const auto r = run("sweep --grid 2e-9:4e-9:2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto tab = parse_csv(r.out);
  EXPECT_EQ(tab.header, (std::vector<std::string>{"T_s", "J_A2s", "I_peak_A", "eta", "rho_per_s"}));
  EXPECT_EQ(tab.rows(), 2u);
}

TEST(CliSweep, TrendsOverTauGrid) {
  const auto r = run("sweep --grid-tau 1:8:8 --threads 2");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto tab = parse_csv(r.out);
  ASSERT_EQ(tab.rows(), 8u);
  for (std::size_t i = 1; i < tab.rows(); ++i) {
    EXPECT_LT(tab.columns[1][i], tab.columns[1][i - 1]);
    EXPECT_GE(tab.columns[3][i], tab.columns[3][i - 1] * (1.0 - 0.02));
  }
}

TEST(CliSweep, ThreadCountDoesNotChangeOutput) {
  const auto a = run("sweep --grid-tau 0.5:3:4 --threads 1");
  const auto b = run("sweep --grid-tau 0.5:3:4 --threads 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliSweep, AllPointsFailing) {
  const auto r = run("sweep --grid-tau 1:2:2 --cutoff at-T");
  EXPECT_EQ(r.code, 1);
  const auto tab = parse_csv(r.out);
  EXPECT_EQ(tab.rows(), 2u);
  EXPECT_TRUE(std::isnan(tab.columns[3][0]));
  EXPECT_NE(r.out.find("NA"), std::string::npos);
}

TEST(CliSweep, BadGridsAreUsageErrors) {
  EXPECT_EQ(run("sweep --grid 1e-9:2e-9:1").code, 2);
  EXPECT_EQ(run("sweep --grid 2e-9:1e-9:3").code, 2);
  EXPECT_EQ(run("sweep --grid 1e-9:2e-9").code, 2);
  EXPECT_EQ(run("sweep").code, 2);
  EXPECT_EQ(run("sweep --grid 1e-9:2e-9:2 --grid-tau 1:2:2").code, 2);
}

// --- metric -------------------------------------------------------------------------

namespace {

std::string metric_value(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ",", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

}  // namespace

TEST(CliMetric, RectangleOfOneNanosecond) {
  std::ostringstream csv;
  csv << "t_s,value\n";
  for (int k = 0; k < 3000; ++k)
    csv << io::format_number(k * 1e-12) << ',' << ((k >= 1000 && k < 2000) ? 1 : 0) << '\n';
  write_file(path("rect.csv"), csv.str());
  const auto r = run("metric --trace " + path("rect.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(rel(std::stod(metric_value(r.out, "rho_per_s")), 1e9), 1e-9);
  EXPECT_LT(rel(std::stod(metric_value(r.out, "rho_per_ns")), 1.0), 1e-9);
  EXPECT_EQ(metric_value(r.out, "pulse_count"), "1");
}

TEST(CliMetric, GaussianWidth) {
  const double sigma = 46.75e-12;
  std::ostringstream csv;
  csv << "t_s,value\n";
  for (int k = 0; k < 2001; ++k) {
    const double x = (k * 1e-12 - 1e-9) / sigma;
    csv << io::format_number(k * 1e-12) << ',' << io::format_number(std::exp(-0.5 * x * x)) << '\n';
  }
  write_file(path("gauss.csv"), csv.str());
  const auto r = run("metric --trace " + path("gauss.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(metric_value(r.out, "fwhm_ps")), 110.0, 1.0);
}

TEST(CliMetric, WindowIsApplied) {
  write_file(path("win.csv"), "t_s,value\n0,0\n1,4\n2,0\n3,1\n4,1\n5,1\n");
  const auto r = run("metric --trace " + path("win.csv") + " --window-start 3 --window-end 5");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(rel(std::stod(metric_value(r.out, "rho_per_s")), 1.0 / 3.0), 1e-12);
  EXPECT_EQ(metric_value(r.out, "window_start_s"), "3");
  EXPECT_EQ(metric_value(r.out, "window_end_s"), "5");
}

TEST(CliMetric, NegativeSamples) {
  write_file(path("neg.csv"), "t_s,value\n0,0\n1,1\n2,-0.1\n3,2\n4,0\n");
  EXPECT_EQ(run("metric --trace " + path("neg.csv")).code, 1);
  const auto r = run("metric --trace " + path("neg.csv") + " --clamp-negative");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("clamped 1"), std::string::npos);
}

TEST(CliMetric, NonUniformSamplingReportsRow) {
  write_file(path("nonuni.csv"), "t_s,value\n0,0\n1,1\n2,2\n3,1\n4.5,0\n");
  const auto r = run("metric --trace " + path("nonuni.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("row 4"), std::string::npos);
}

// --- circuit ------------------------------------------------------------------------

TEST(CliCircuit, RlcReferenceDesignApproachesOneAmp) {
  const auto r = run("circuit --topology rlc --param R=5 --param C=150e-12 --param L=15e-9 "
                     "--param V=5 --t-end 100e-9 --dt 1e-10 --out " + path("rlc.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto tab = read_csv(path("rlc.csv"));
  EXPECT_EQ(tab.header[0], "t_s");
  EXPECT_EQ(tab.header[1], "I_A");
  EXPECT_LT(rel(tab.columns[1].back(), 1.0), 1e-9);
  EXPECT_EQ(read_json(path("rlc.json"))["damping"], "critical");
}

TEST(CliCircuit, SatInductorTerminalSlope) {
  const auto r = run("circuit --topology sat-inductor --T 10e-9 --dt 1e-12 --out " + path("sat.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto tab = read_csv(path("sat.csv"));
  const auto& I = tab.columns[1];
  const std::size_t n = I.size();
  const double slope = (I[n - 1] - I[n - 2]) / 1e-12;
  EXPECT_LT(rel(slope, 5.0 / 10e-9), 0.05);
}

TEST(CliCircuit, SelfFitHasNearZeroResidual) {
  const auto r = run("circuit --topology rlc --fit --reference self --out " + path("self.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("topology = rlc"), std::string::npos);
  EXPECT_NE(r.out.find("converged = true"), std::string::npos);
  const auto fit = read_json(path("self.json"))["fit"];
  EXPECT_LT(fit["rms_rel"].get<double>(), 1e-9);
}

TEST(CliCircuit, FitReportFile) {
  const auto r = run("circuit --topology bjt --fit --seed 4 --report " + path("bjt_report.txt") +
                     " --out " + path("bjt.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = slurp(path("bjt_report.txt"));
  for (const char* k : {"topology = bjt", "param.I_ES = ", "param.ramp_rate = ", "rms_A = ",
                        "converged = ", "seed = 4"})
    EXPECT_NE(rep.find(k), std::string::npos) << k;
  const auto tab = read_csv(path("bjt.csv"));
  EXPECT_EQ(tab.header.back(), "I_fit_A");
}

TEST(CliCircuit, UsageErrors) {
  EXPECT_EQ(run("circuit --topology flyback").code, 2);
  EXPECT_EQ(run("circuit").code, 2);
  EXPECT_EQ(run("circuit --topology rlc --param Q=1").code, 2);
  EXPECT_EQ(run("circuit --topology rlc --param R").code, 2);
}

TEST(CliCircuit, InvalidComponentValueIsRuntimeError) {
  EXPECT_EQ(run("circuit --topology rlc --param R=-5").code, 1);
}

// --- common behaviour ---------------------------------------------------------------

TEST(CliCommon, DeterministicOutput) {
  const std::string args = "circuit --topology multi-resonant --branches 2 --fit --seed 9";
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);
}

TEST(CliCommon, ConfigFileMergesAndFlagsWin) {
  write_file(path("run.ini"), "[optimal]\nT=5e-9\ndt=1e-9\n");
  const auto a = run("--config " + path("run.ini") + " optimal");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(parse_csv(a.out).rows(), 6u);
  const auto b = run("--config " + path("run.ini") + " optimal --dt 2.5e-9");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(parse_csv(b.out).rows(), 3u);
}

TEST(CliCommon, FixtureDirectoryOverride) {
  const fs::path dir = tmp_dir() / "fixtures";
  fs::create_directories(dir);
  auto j = io::laser_params_to_json(P);
  j["V"] = 2e-16;
  write_file((dir / "big.json").string(), j.dump());
  const auto r = run("optimal --laser big --T 5e-9 --format json",
                     "GAINSWITCH_FIXTURES='" + dir.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  LaserParams q = P;
  q.V = 2e-16;
  const auto s = nlohmann::json::parse(r.out)["summary"];
  EXPECT_LT(rel(s["I_th_A"].get<double>(), threshold_current(q)), 1e-15);
  EXPECT_EQ(run("optimal --laser big --T 5e-9").code, 1);
}

TEST(CliCommon, BadLaserFileIsRuntimeError) {
  auto j = io::laser_params_to_json(P);
  j["colour"] = 1;
  write_file(path("bad_laser.json"), j.dump());
  const auto r = run("optimal --T 5e-9 --laser " + path("bad_laser.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("colour"), std::string::npos);
}

TEST(CliCommon, HelpExitsZero) { EXPECT_EQ(run("--help").code, 0); }
