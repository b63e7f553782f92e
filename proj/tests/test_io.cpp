#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "gainswitch/io.hpp"
#include "gainswitch/random.hpp"

using namespace gainswitch;

namespace {

bool message_contains(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
  } catch (const std::exception& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST(NumberFormat, ShortestRoundTrip) {
  SplitMix64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double v = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-30.0, 30.0));
    const auto back = io::parse_number(io::format_number(v));
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, v);
  }
  EXPECT_EQ(io::format_number(0.5), "0.5");
  EXPECT_EQ(io::format_number(1e-9), "1e-09");
  EXPECT_EQ(io::format_number(std::nan("")), "NA");
}

TEST(NumberFormat, ParseRejectsJunk) {
  EXPECT_FALSE(io::parse_number(""));
  EXPECT_FALSE(io::parse_number("1.0x"));
  EXPECT_FALSE(io::parse_number("abc"));
  EXPECT_EQ(io::parse_number(" +2.5 "), 2.5);
}

// --- laser parameters -------------------------------------------------------------

TEST(LaserJson, DefaultFixtureMatchesBuiltIn) {
  const LaserParams p = io::resolve_laser("default-1W-850nm");
  const LaserParams d = default_laser();
  EXPECT_EQ(io::laser_params_to_json(p), io::laser_params_to_json(d));
}

TEST(LaserJson, RoundTrip) {
  const auto j = io::laser_params_to_json(default_laser());
  const LaserParams p = io::laser_params_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(io::laser_params_to_json(p), j);
}

TEST(LaserJson, RejectsUnknownMissingAndInvalid) {
  auto j = nlohmann::json::parse(io::laser_params_to_json(default_laser()).dump());
  auto extra = j;
  extra["temperature"] = 300;
  EXPECT_TRUE(message_contains([&] { io::laser_params_from_json(extra); }, "temperature"));
  auto missing = j;
  missing.erase("g0");
  EXPECT_TRUE(message_contains([&] { io::laser_params_from_json(missing); }, "g0"));
  auto negative = j;
  negative["tau_N"] = -1.0;
  EXPECT_THROW(io::laser_params_from_json(negative), InputError);
  auto text = j;
  text["V"] = "small";
  EXPECT_THROW(io::laser_params_from_json(text), InputError);
}

TEST(LaserJson, ElementaryChargeIsFixed) {
  auto j = nlohmann::json::parse(io::laser_params_to_json(default_laser()).dump());
  j["e"] = kElementaryCharge;
  EXPECT_NO_THROW(io::laser_params_from_json(j));
  j["e"] = 1.6e-19;
  EXPECT_THROW(io::laser_params_from_json(j), InputError);
}

TEST(LaserJson, FixtureDirectoryFromEnvironment) {
  const auto dir = std::filesystem::temp_directory_path() / "gainswitch_io_fixtures";
  std::filesystem::create_directories(dir);
  auto j = io::laser_params_to_json(default_laser());
  j["V"] = 2e-16;
  std::ofstream(dir / "double-volume.json") << j.dump();
  setenv("GAINSWITCH_FIXTURES", dir.c_str(), 1);
  const LaserParams p = io::resolve_laser("double-volume");
  unsetenv("GAINSWITCH_FIXTURES");
  EXPECT_EQ(p.V, 2e-16);
  EXPECT_THROW(io::resolve_laser("no-such-fixture"), InputError);
  EXPECT_EQ(io::resolve_laser((dir / "double-volume.json").string()).V, 2e-16);
}

// --- traces ---------------------------------------------------------------------------

TEST(Trace, ReadsUniformTrace) {
  std::istringstream in("t_s,value\n0,1\n1e-12,2\n2e-12,3\n");
  const auto tr = io::read_trace(in);
  EXPECT_EQ(tr.signal.size(), 3u);
  EXPECT_DOUBLE_EQ(tr.signal.dt(), 1e-12);
  EXPECT_EQ(tr.signal[2], 3.0);
}

TEST(Trace, SelectsNamedColumn) {
  std::istringstream in("t_s,N_m3,S_m3\n0,5,1\n1,6,2\n");
  io::TraceOptions o;
  o.column = "S_m3";
  EXPECT_EQ(io::read_trace(in, o).signal[1], 2.0);
  std::istringstream in2("t_s,N_m3\n0,5\n1,6\n");
  o.column = "Q";
  EXPECT_THROW(io::read_trace(in2, o), InputError);
}

TEST(Trace, NonUniformSamplingNamesRow) {
  std::istringstream in("t_s,value\n0,1\n1,2\n2,3\n3.5,4\n");
  EXPECT_TRUE(message_contains([&] { io::read_trace(in); }, "non-uniform sampling at row 3"));
}

TEST(Trace, ToleratesRoundingInTimes) {
  std::istringstream in("t_s,value\n0,1\n1e-12,2\n2.0000000000001e-12,3\n");
  EXPECT_NO_THROW(io::read_trace(in));
}

TEST(Trace, NegativeSamplesNeedClampFlag) {
  const std::string csv = "t_s,value\n0,1\n1,-0.5\n2,3\n";
  std::istringstream a(csv);
  EXPECT_THROW(io::read_trace(a), InputError);
  std::istringstream b(csv);
  io::TraceOptions o;
  o.clamp_negative = true;
  const auto tr = io::read_trace(b, o);
  EXPECT_EQ(tr.clamped, 1u);
  EXPECT_EQ(tr.signal[1], 0.0);
}

TEST(Trace, HeaderIsRequired) {
  std::istringstream in("0,1\n1,2\n");
  EXPECT_THROW(io::read_trace(in), InputError);
}

TEST(Csv, WriteThenReadIsLossless) {
  SplitMix64 rng(8);
  std::vector<double> t(100), v(100);
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = 1.234e-12 * static_cast<double>(k);
    v[k] = rng.uniform() * 1e21;
  }
  std::stringstream ss;
  io::write_csv(ss, {"t_s", "S_m3"}, {&t, &v});
  const auto tab = io::read_table(ss);
  ASSERT_EQ(tab.rows(), t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_EQ(tab.columns[0][k], t[k]);
    EXPECT_EQ(tab.columns[1][k], v[k]);
  }
}

TEST(Csv, MissingValuesReadAsNaN) {
  std::istringstream in("a,b\n1,NA\n");
  const auto tab = io::read_table(in);
  EXPECT_TRUE(std::isnan(tab.columns[1][0]));
}
