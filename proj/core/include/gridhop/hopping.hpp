#pragma once

#include <vector>

#include "gridhop/indirect.hpp"
#include "gridhop/interp.hpp"
#include "gridhop/model.hpp"
#include "gridhop/synth.hpp"

namespace gridhop {

// Zero-padded fast-time DFT of every chirp, per receiver:
//   Z_q(m_c, i) = <Y_q[m_c], a(i / os_range)>
std::vector<CMat> fast_time_spectra(const FrameSet& frame, int os_range);

// Interpolated location decision at one grid bin:
//   sum_q sum_{m_c} | sum_j c_j(bin,q) * Z_q(m_c, I_j(bin,q)) |^2
double hop_location_decision(const std::vector<CMat>& spectra,
                             const HopTable& table, int bin);

// All bins at once (fixed chunking, deterministic for any n_threads).
std::vector<double> hop_decision_map(const std::vector<CMat>& spectra,
                                     const HopTable& table, int n_threads = 1);

// Velocity by single-index Doppler hopping: the slow-time vector h_q is
// range-compressed exactly at x_hat, its oversampled Doppler power spectrum
// is read at the nearest bin for each candidate v.
Vec2 hop_velocity(const WaveformConfig& cfg, const SceneGeometry& geom,
                  const FrameSet& frame, const Vec2& x_hat,
                  const VelocityGrid& vgrid, int os_doppler = 1);

// Full pipeline against a prebuilt table. The table must match the scene
// (hash/shape check; "stale hop table" otherwise). Table construction time is
// offline and never included here.
Estimate hop_estimate(const WaveformConfig& cfg, const SceneGeometry& geom,
                      const FrameSet& frame, const HopTable& table,
                      const LocationGrid& lgrid, const VelocityGrid& vgrid,
                      int os_doppler = 1, int n_threads = 1);

}  // namespace gridhop
