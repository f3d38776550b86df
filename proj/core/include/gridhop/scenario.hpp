#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridhop/interp.hpp"
#include "gridhop/model.hpp"

namespace gridhop {

enum class Algorithm { indirect, direct, hop };

std::string_view algorithm_name(Algorithm a);
Algorithm algorithm_from_name(std::string_view name);  // throws with valid names

enum class SceneMode { offgrid, ongrid };

// A full Monte Carlo campaign description, parsed from a key=value text file.
// Key reference lives in the README; unknown or malformed keys fail with the
// offending line number.
struct Scenario {
  WaveformConfig cfg;
  SceneGeometry geom;

  Vec2 grid_origin = Vec2::Zero();
  Vec2 grid_extent = Vec2::Zero();
  double speed_bound = 15.0;
  double velocity_density = 1.0;

  SceneMode mode = SceneMode::offgrid;
  std::vector<std::optional<double>> snr_db = {std::nullopt};  // nullopt = noiseless
  std::vector<double> densities = {1.0, 2.0, 4.0};
  std::vector<double> thresholds_m;  // defaults to 0.2, 0.4 .. 3.0
  int trials = 1;
  int frames = 1;  // frames written by `simulate`
  uint64_t seed = 1;

  std::vector<Algorithm> algorithms = {Algorithm::indirect, Algorithm::direct,
                                       Algorithm::hop};
  InterpScheme scheme = InterpScheme::poly3;
  int os_range = 4;    // hop-table fast-time oversampling
  int os_doppler = 1;  // Doppler oversampling for hop velocity / indirect maps
  bool timing = true;  // false: timing columns forced to 0, single repetition

  LocationGrid location_grid(double density) const {
    return LocationGrid::build(cfg, grid_origin, grid_extent, density);
  }
  VelocityGrid velocity_grid() const {
    return VelocityGrid::build(cfg, speed_bound, velocity_density);
  }
};

Scenario parse_scenario(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::string& path);

}  // namespace gridhop
