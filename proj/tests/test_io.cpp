#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "segdep/io.hpp"

using namespace segdep;
using namespace segdep::io;

TEST_CASE("parse a series with optional truth column") {
  const auto t = parse_table("x,y,z\n0,1.5,1\n\n0.5,2,2\n1,-3e-1,3\n", "mem");
  const auto s = series_from_table(t, "mem");
  CHECK(s.series.n() == 3);
  CHECK(s.series.y_at(3) == -0.3);
  REQUIRE(s.z);
  CHECK(s.z->at(1) == 2.0);
}

TEST_CASE("table errors carry the line number") {
  CHECK_THROWS_WITH_AS(parse_table("x,y\n0,1\n1,abc\n", "f.csv"), "f.csv:3: not a number: 'abc'", InvalidArgument);
  CHECK_THROWS_WITH_AS(parse_table("x,y\n0,1,2\n", "f.csv"), "f.csv:2: expected 2 fields, found 3", InvalidArgument);
  CHECK_THROWS_AS(parse_table("", "f.csv"), InvalidArgument);
  const auto t = parse_table("x,y\n0,1\n\n0.5,2\n0.5,3\n", "f.csv");
  CHECK_THROWS_WITH_AS(series_from_table(t, "f.csv"), "f.csv:5: x must be strictly increasing", InvalidArgument);
  CHECK_THROWS_AS(series_from_table(parse_table("x,w\n0,1\n1,2\n", "f"), "f"), InvalidArgument);
  CHECK_THROWS_AS(series_from_table(parse_table("x,y,q\n0,1,1\n1,2,1\n", "f"), "f"), InvalidArgument);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("series csv round trip through a file") {
  const auto dir = std::filesystem::temp_directory_path() / "segdep_io_test";
  std::filesystem::create_directories(dir);
  const TimeSeries ts({0.0, 0.25, 1.0}, {1.0 / 3.0, -2.0, 5.5});
  const std::vector<double> z{1.0, 2.0, 3.0};
  write_file_atomic(dir / "s.csv", series_to_csv(ts, &z));
  CHECK_FALSE(std::filesystem::exists(dir / "s.csv.tmp"));
  const auto back = read_series(dir / "s.csv");
  CHECK(back.series.y() == ts.y());
  CHECK(back.series.x() == ts.x());
  CHECK(*back.z == z);
  CHECK_THROWS_AS(read_series(dir / "missing.csv"), InvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing") {
  const auto cfg = Config::parse("# comment\np = 0.01\nseed = 42 # trailing\nresimulate = no\npower_c = 0, 1.5,3\n", "c");
  CHECK(cfg.get_double("p", 0.0) == 0.01);
  CHECK(cfg.get_seed("seed", 0) == 42);
  CHECK_FALSE(cfg.get_bool("resimulate", true));
  CHECK(cfg.get_list("power_c", {}) == std::vector<double>{0.0, 1.5, 3.0});
  CHECK(cfg.get_double("nu0", 2.5) == 2.5);
  CHECK_THROWS_WITH_AS(Config::parse("p = 1\nbogus = 2\n", "c.cfg"), "c.cfg:2: unknown config key 'bogus'",
                       InvalidArgument);
  CHECK_THROWS_AS(Config::parse("p\n", "c"), InvalidArgument);
  CHECK_THROWS_AS(Config::parse("p = x\n", "c").get_double("p", 0.0), InvalidArgument);
  auto round = Config::parse(cfg.to_text(), "again");
  CHECK(round.get_list("power_c", {}).size() == 3);
  round.set("n", "64");
  CHECK(round.get_int("n", 0) == 64);
  CHECK_THROWS_AS(round.set("nope", "1"), InvalidArgument);
}

TEST_CASE("fit options from config") {
  const auto defaults = fit_options_from_config(Config{}, 100);
  CHECK(defaults.hp.segment_length.p() == doctest::Approx(0.04));
  CHECK(defaults.hp.delta == Vec3(1.0, 100.0, 1600.0));
  CHECK(defaults.resample.threshold == 1e-6);
  CHECK(defaults.n_draws == 1000);
  CHECK(defaults.seed == 1);
  CHECK_THROWS_AS(fit_options_from_config(Config::parse("p = 1.5\n", "c"), 100), InvalidArgument);
  CHECK_THROWS_AS(fit_options_from_config(Config::parse("n_draws = 0\n", "c"), 100), InvalidArgument);
  CHECK_THROWS_AS(fit_options_from_config(Config::parse("resample_threshold = 1\n", "c"), 100), InvalidArgument);
}
