#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gridhop/scenario.hpp"

using namespace gridhop;

namespace {

const char* kFull = R"(# full campaign description
f0 = 77e9
bandwidth = 300e6
chirp_duration = 50e-6
n_chirps = 64
n_samples = 256

tx = 0 0
rx = -14 8
rx = 16 5          # trailing comments are fine
rx = 2 -11

grid_origin = -8 -6
grid_extent = 15 12
speed_bound = 12.5
velocity_density = 1

mode = offgrid
snr_db = 0 5 none
densities = 1 2 4
thresholds = 0.5 1 2
trials = 250
frames = 3
seed = 99

algorithms = direct hop
scheme = linear
oversample = 8
doppler_oversample = 2
timing = off
)";

Scenario minimal() {
  return parse_scenario(
      "tx = 0 0\nrx = 1 2\nrx = 3 4\ngrid_origin = -1 -1\ngrid_extent = 2 2\n",
      "mem");
}

void expect_parse_error(const std::string& text, const char* needle) {
  try {
    static_cast<void>(parse_scenario(text, "mem"));
    FAIL_CHECK("expected parse failure: " << needle);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("algorithm names round-trip") {
  for (auto a : {Algorithm::indirect, Algorithm::direct, Algorithm::hop})
    CHECK(algorithm_from_name(algorithm_name(a)) == a);
  CHECK_THROWS_WITH_AS(static_cast<void>(algorithm_from_name("joint")),
                       doctest::Contains("valid: indirect, direct, hop"),
                       std::invalid_argument);
}

TEST_CASE("a full scenario file parses into every field") {
  const Scenario sc = parse_scenario(kFull, "mem");
  CHECK(sc.cfg.f0 == 77.0e9);
  CHECK(sc.cfg.bandwidth == 300.0e6);
  CHECK(sc.cfg.chirp_duration == 50.0e-6);
  CHECK(sc.cfg.n_chirps == 64);
  CHECK(sc.cfg.n_samples == 256);
  CHECK(sc.cfg.c == kSpeedOfLight);
  CHECK((sc.geom.tx - Vec2{0, 0}).norm() == 0.0);
  REQUIRE(sc.geom.rx.size() == 3);
  CHECK((sc.geom.rx[1] - Vec2{16, 5}).norm() == 0.0);
  CHECK((sc.grid_origin - Vec2{-8, -6}).norm() == 0.0);
  CHECK((sc.grid_extent - Vec2{15, 12}).norm() == 0.0);
  CHECK(sc.speed_bound == 12.5);
  CHECK(sc.velocity_density == 1.0);
  CHECK(sc.mode == SceneMode::offgrid);
  REQUIRE(sc.snr_db.size() == 3);
  CHECK(*sc.snr_db[0] == 0.0);
  CHECK(*sc.snr_db[1] == 5.0);
  CHECK(!sc.snr_db[2].has_value());
  CHECK(sc.densities == std::vector<double>{1.0, 2.0, 4.0});
  CHECK(sc.thresholds_m == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(sc.trials == 250);
  CHECK(sc.frames == 3);
  CHECK(sc.seed == 99);
  REQUIRE(sc.algorithms.size() == 2);
  CHECK(sc.algorithms[0] == Algorithm::direct);
  CHECK(sc.algorithms[1] == Algorithm::hop);
  CHECK(sc.scheme == InterpScheme::linear);
  CHECK(sc.os_range == 8);
  CHECK(sc.os_doppler == 2);
  CHECK(!sc.timing);
}

TEST_CASE("defaults fill everything the file leaves out") {
  const Scenario sc = minimal();
  CHECK(sc.cfg.f0 == 24.0e9);
  CHECK(sc.mode == SceneMode::offgrid);
  REQUIRE(sc.snr_db.size() == 1);
  CHECK(!sc.snr_db[0].has_value());
  CHECK(sc.densities == std::vector<double>{1.0, 2.0, 4.0});
  REQUIRE(sc.thresholds_m.size() == 15);
  CHECK(sc.thresholds_m.front() == doctest::Approx(0.2));
  CHECK(sc.thresholds_m.back() == doctest::Approx(3.0));
  CHECK(sc.trials == 1);
  CHECK(sc.algorithms.size() == 3);
  CHECK(sc.scheme == InterpScheme::poly3);
  CHECK(sc.os_range == 4);
  CHECK(sc.os_doppler == 1);
  CHECK(sc.timing);

  // grid helpers build from the parsed fields
  const LocationGrid lg = sc.location_grid(2.0);
  CHECK(lg.spacing == doctest::Approx(sc.cfg.range_resolution() / 2.0));
  CHECK(lg.nx >= 2);
  const VelocityGrid vg = sc.velocity_grid();
  CHECK(vg.size() >= 9);
}

TEST_CASE("parse errors carry the offending line number") {
  expect_parse_error("tx = 0 0\nwhat = 1\n", "mem:2: unknown key 'what'");
  expect_parse_error("f0 : 1\n", "mem:1: expected 'key = value...'");
  expect_parse_error("f0 =\n", "mem:1: 'f0' has no value");
  expect_parse_error("tx = 0\n", "mem:1: 'tx' expects two numbers");
  expect_parse_error("f0 = fast\n", "mem:1: expected a number, got 'fast'");
  expect_parse_error("n_chirps = 2.5\n", "mem:1: expected an integer");
  expect_parse_error("seed = -3\n", "mem:1: 'seed' must be a nonnegative integer");
  expect_parse_error("mode = sideways\n", "mem:1: 'mode' must be");
  expect_parse_error("timing = maybe\n", "mem:1: 'timing' must be");
  expect_parse_error("snr_db = loud\n", "mem:1: expected a number");
  expect_parse_error("scheme = cubic\n", "mem:1: unknown interpolation scheme");
}

TEST_CASE("structural validation happens after the whole file") {
  expect_parse_error("rx = 1 2\nrx = 3 4\ngrid_origin = 0 0\ngrid_extent = 1 1\n",
                     "mem: missing 'tx'");
  expect_parse_error("tx = 0 0\ngrid_origin = 0 0\ngrid_extent = 1 1\n",
                     "mem: missing 'rx'");
  expect_parse_error("tx = 0 0\nrx = 1 2\nrx = 3 4\ngrid_extent = 1 1\n",
                     "mem: missing 'grid_origin'");
  expect_parse_error("tx = 0 0\nrx = 1 2\nrx = 3 4\ngrid_origin = 0 0\n",
                     "mem: missing 'grid_extent'");

  const std::string base =
      "tx = 0 0\nrx = 1 2\nrx = 3 4\ngrid_origin = -1 -1\ngrid_extent = 2 2\n";
  expect_parse_error(base + "trials = 0\n", "'trials' must be >= 1");
  expect_parse_error(base + "densities = 1 -2\n", "densities must be positive");
  expect_parse_error(base + "thresholds = 1 1\n", "thresholds must ascend");
  expect_parse_error(base + "thresholds = -1 2\n", "thresholds must be positive");
  expect_parse_error(base + "speed_bound = 0\n", "'speed_bound' must be positive");
  expect_parse_error(base + "oversample = 0\n", "oversampling must be >= 1");
  expect_parse_error(base + "grid_extent = -2 2\n", "'grid_extent' must be positive");
  expect_parse_error(base + "bandwidth = 0\n", "bandwidth must be positive");
  expect_parse_error(base + "rx = 1 2\n", "receivers coincide");
}

TEST_CASE("algorithms line with a bad name points at its own line") {
  expect_parse_error(
      "tx = 0 0\nalgorithms = direct warp\n",
      "mem:2: unknown algorithm 'warp' (valid: indirect, direct, hop)");
}

TEST_CASE("load_scenario reports unreadable paths") {
  CHECK_THROWS_WITH_AS(
      static_cast<void>(load_scenario("/nonexistent/sc.scn")),
      doctest::Contains("cannot open scenario file"), std::invalid_argument);
}
