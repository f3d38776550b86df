#pragma once

#include <cstdint>
#include <vector>

#include "gridhop/model.hpp"
#include "gridhop/synth.hpp"

namespace gridhop {

// Modulus of the zero-padded 2D DFT of one receiver's frame. Rows are Doppler
// (shifted so the axis ascends from -n_chirps/2), columns are range.
struct RangeDopplerMap {
  Eigen::MatrixXd values;            // (os_doppler*Mc) x (os_range*Ms)
  std::vector<double> doppler_axis;  // u of each row, strictly ascending
  std::vector<double> range_axis;    // r of each column, strictly ascending
  int os_range = 1;
  int os_doppler = 1;

  struct Peak {
    double r = 0.0, u = 0.0;
    int row = 0, col = 0;
    double value = 0.0;
  };
  // Global maximum; ties go to the smallest row-major linear index, i.e. the
  // most negative Doppler first, then the smallest range.
  Peak peak() const;
};

RangeDopplerMap range_doppler_map(const CMat& frame_rx, int os_range = 1,
                                  int os_doppler = 1);

struct LatticeFix {
  Vec2 estimate = Vec2::Zero();
  int index = 0;
  double residual = 0.0;  // sum of squared bin residuals at the estimate
};

// argmin over the grid of sum_q (sensed_range(x') - r_hat_q)^2
LatticeFix multilaterate_location(const WaveformConfig& cfg,
                                  const SceneGeometry& geom,
                                  const std::vector<double>& range_bins,
                                  const LocationGrid& grid);

// argmin over the grid of sum_q (sensed_doppler(x_hat, v') - u_hat_q)^2
LatticeFix multilaterate_velocity(const WaveformConfig& cfg,
                                  const SceneGeometry& geom,
                                  const std::vector<double>& doppler_bins,
                                  const Vec2& x_hat, const VelocityGrid& grid);

// Two-stage wall-clock split. Meaning per pipeline:
//   indirect:     stage1 = FFTs + peak picking,  stage2 = multilateration
//   direct:       stage1 = location scan,        stage2 = velocity scan
//   grid hopping: stage1 = fast-time spectra,    stage2 = hop scan + velocity
struct StageTimes {
  int64_t stage1_ns = 0;
  int64_t stage2_ns = 0;
  int64_t total() const { return stage1_ns + stage2_ns; }
};

struct Estimate {
  Vec2 x = Vec2::Zero();
  Vec2 v = Vec2::Zero();
  StageTimes times;
};

// Per-receiver 2D FFT peaks, then least-squares fusion on the two lattices.
Estimate indirect_estimate(const WaveformConfig& cfg, const SceneGeometry& geom,
                           const FrameSet& frame, const LocationGrid& lgrid,
                           const VelocityGrid& vgrid, int os_range = 1,
                           int os_doppler = 1);

}  // namespace gridhop
