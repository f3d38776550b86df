#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gridhop/direct.hpp"
#include "gridhop/rng.hpp"
#include "support/oracles.hpp"

using namespace gridhop;

namespace {

WaveformConfig small_cfg() {
  WaveformConfig cfg;
  cfg.f0 = 24.0e9;
  cfg.bandwidth = 250.0e6;
  cfg.chirp_duration = 1.0e-4;
  cfg.n_chirps = 32;
  cfg.n_samples = 64;
  return cfg;
}

SceneGeometry near_geom() {
  SceneGeometry g;
  g.tx = {0.0, 0.0};
  g.rx = {{-10.0, 6.0}, {12.0, 4.0}, {1.0, -9.0}};
  return g;
}

FrameSet random_frames(const WaveformConfig& cfg, int q_count, uint64_t stream) {
  Rng rng(stream);
  FrameSet frame(static_cast<size_t>(q_count));
  for (CMat& y : frame) {
    y.resize(cfg.n_chirps, cfg.n_samples);
    for (int i = 0; i < cfg.n_chirps; ++i)
      for (int j = 0; j < cfg.n_samples; ++j)
        y(i, j) = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  }
  return frame;
}

}  // namespace

TEST_CASE("location decision matches its literal definition") {
  const WaveformConfig cfg = small_cfg();
  const SceneGeometry geom = near_geom();
  const FrameSet frame = random_frames(cfg, 3, 41);

  Rng rng(42);
  for (int rep = 0; rep < 8; ++rep) {
    const Vec2 x{rng.uniform(-5.0, 5.0), rng.uniform(-4.0, 4.0)};
    const double got = location_decision(cfg, geom, frame, x);
    const double want = oracle::location_decision(cfg, geom, frame, x);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("decision map equals pointwise decisions and ignores thread count") {
  const WaveformConfig cfg = small_cfg();
  const SceneGeometry geom = near_geom();
  const FrameSet frame = random_frames(cfg, 3, 43);
  const LocationGrid grid = LocationGrid::build(cfg, {-5.0, -4.0}, {10.0, 8.0}, 1.0);

  const std::vector<double> map1 = location_decision_map(cfg, geom, frame, grid, 1);
  REQUIRE(static_cast<int>(map1.size()) == grid.size());
  for (int k = 0; k < grid.size(); k += 17)
    CHECK(map1[k] ==
          doctest::Approx(location_decision(cfg, geom, frame, grid.point(k)))
              .epsilon(1e-12));

  const std::vector<double> map3 = location_decision_map(cfg, geom, frame, grid, 3);
  CHECK(map1 == map3);  // bitwise equal by construction
}

TEST_CASE("velocity decision matches its literal definition") {
  const WaveformConfig cfg = small_cfg();
  const SceneGeometry geom = near_geom();
  const FrameSet frame = random_frames(cfg, 3, 44);
  const Vec2 x{3.0, 2.0};

  Rng rng(45);
  for (int rep = 0; rep < 8; ++rep) {
    const Vec2 v{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
    const double got = velocity_decision(cfg, geom, frame, x, v);
    const double want = oracle::velocity_decision(cfg, geom, frame, x, v);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("argmax takes the first strict maximum") {
  CHECK(argmax_index({1.0, 3.0, 3.0, 2.0}) == 1);
  CHECK(argmax_index({5.0}) == 0);
  CHECK(argmax_index({-2.0, -1.0, -1.0}) == 1);
  CHECK_THROWS_AS(argmax_index({}), std::invalid_argument);
}

TEST_CASE("direct pipeline recovers an exact-bin scene") {
  WaveformConfig cfg = small_cfg();
  cfg.n_chirps = 64;
  const LocationGrid lgrid = LocationGrid::build(cfg, {-5.0, -4.0}, {10.0, 8.0}, 1.0);
  const VelocityGrid vgrid = VelocityGrid::build(cfg, 12.0, 1.0);

  for (uint64_t trial = 0; trial < 5; ++trial) {
    const OnGridScene s = make_ongrid_scene(cfg, 3, lgrid, vgrid, 23, trial);
    const FrameSet frame = synthesize_frame(cfg, s.geom, {s.target});
    const Estimate est = direct_estimate(cfg, s.geom, frame, lgrid, vgrid);
    CHECK((est.x - s.target.x).norm() == 0.0);
    CHECK((est.v - s.target.v).norm() == 0.0);
    CHECK(est.times.stage1_ns >= 0);
    CHECK(est.times.stage2_ns >= 0);

    // direct_velocity standalone agrees with the embedded velocity stage
    const Vec2 v2 = direct_velocity(cfg, s.geom, frame, est.x, vgrid);
    CHECK((v2 - est.v).norm() == 0.0);
  }
}

TEST_CASE("scan dies loudly when the grid contains a station") {
  const WaveformConfig cfg = small_cfg();
  SceneGeometry geom = near_geom();
  geom.rx[0] = {-4.0, -4.0};  // exactly a lattice point of the grid below
  const FrameSet frame = random_frames(cfg, 3, 46);
  const LocationGrid grid = LocationGrid::build(cfg, {-4.0, -4.0}, {8.0, 8.0}, 1.0);
  CHECK_THROWS_AS(
      static_cast<void>(location_decision_map(cfg, geom, frame, grid)),
      std::domain_error);
}

TEST_CASE("decisions reject malformed inputs") {
  const WaveformConfig cfg = small_cfg();
  const SceneGeometry geom = near_geom();
  const LocationGrid grid = LocationGrid::build(cfg, {-5.0, -4.0}, {10.0, 8.0}, 1.0);
  FrameSet two = random_frames(cfg, 2, 47);
  CHECK_THROWS_AS(static_cast<void>(location_decision(cfg, geom, two, {1.0, 1.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      static_cast<void>(location_decision_map(cfg, geom, two, grid)),
      std::invalid_argument);
}
