#pragma once

#include <optional>
#include <vector>

#include "gridhop/model.hpp"

namespace gridhop {

// One measurement frame: Q complex matrices, n_chirps x n_samples each
// (rows = slow time, columns = fast time).
using FrameSet = std::vector<CMat>;

struct NoiseSpec {
  // per-entry SNR in dB relative to |alpha_ref|^2; empty means noiseless
  std::optional<double> snr_db;
  double alpha_ref = 1.0;
  uint64_t seed = 0;

  double sigma() const;
};

// Rank-one superposition: Y_q = sum_t alpha_t * b(u_qt) a(r_qt)^T, noiseless.
// Rejects scenes whose sensed parameters alias (r outside [0, n_samples) or
// |u| >= n_chirps/2).
FrameSet synthesize_frame(const WaveformConfig& cfg, const SceneGeometry& geom,
                          const std::vector<Target>& targets);

// Adds i.i.d. circular complex Gaussian noise, variance sigma^2 per entry,
// independent across receivers. Receiver q draws from substream(seed, trial,
// q), so output is identical however the work is scheduled.
void add_noise(FrameSet& frame, const NoiseSpec& noise, uint64_t trial = 0);

FrameSet synthesize_frame(const WaveformConfig& cfg, const SceneGeometry& geom,
                          const std::vector<Target>& targets,
                          const NoiseSpec& noise, uint64_t trial = 0);

// A scene whose truth sits exactly on the given grids AND whose sensed
// parameters are exact integer bins for every receiver. Used for
// exact-recovery tests: with such a scene every pipeline (including the
// unpadded FFT peak picker) recovers (x, v) bit-for-bin.
//
// Receivers are re-placed along computed directions, so the returned geometry
// keeps only Q from the input. Distances stay within [min_range_m,
// max_range_m] of the target.
struct OnGridScene {
  SceneGeometry geom;
  Target target;
  int loc_index = 0;  // index of target.x on the location grid
  int vel_index = 0;  // index of target.v on the velocity grid
};

OnGridScene make_ongrid_scene(const WaveformConfig& cfg, int n_receivers,
                              const LocationGrid& lgrid, const VelocityGrid& vgrid,
                              uint64_t seed, uint64_t trial,
                              double min_range_m = 6.0, double max_range_m = 60.0);

}  // namespace gridhop
