#pragma once

#include <vector>

#include "gridhop/indirect.hpp"
#include "gridhop/model.hpp"
#include "gridhop/synth.hpp"

namespace gridhop {

// Fused decision value at one candidate location:
//   sum_q sum_{m_c} | <Y_q[m_c], a(sensed_range_q(x))> |^2
double location_decision(const WaveformConfig& cfg, const SceneGeometry& geom,
                         const FrameSet& frame, const Vec2& x);

// Decision value at every grid bin. Bins are processed in fixed-size chunks
// whose layout does not depend on n_threads, so the result is identical for
// any worker count.
std::vector<double> location_decision_map(const WaveformConfig& cfg,
                                          const SceneGeometry& geom,
                                          const FrameSet& frame,
                                          const LocationGrid& grid,
                                          int n_threads = 1);

// Velocity decision at v for a fixed located point:
//   sum_q | <h_q, b(sensed_doppler_q(x_hat, v))> |^2,
// where h_q[m_c] = <Y_q[m_c], a(sensed_range_q(x_hat))> compresses the range
// axis once at x_hat.
double velocity_decision(const WaveformConfig& cfg, const SceneGeometry& geom,
                         const FrameSet& frame, const Vec2& x_hat, const Vec2& v);

Vec2 direct_velocity(const WaveformConfig& cfg, const SceneGeometry& geom,
                     const FrameSet& frame, const Vec2& x_hat,
                     const VelocityGrid& vgrid);

// Exhaustive location scan, then velocity scan at the winner.
Estimate direct_estimate(const WaveformConfig& cfg, const SceneGeometry& geom,
                         const FrameSet& frame, const LocationGrid& lgrid,
                         const VelocityGrid& vgrid, int n_threads = 1);

// First strict maximum (smallest index wins ties). Shared by every grid scan
// so the tie-break is uniform across pipelines.
int argmax_index(const std::vector<double>& values);

}  // namespace gridhop
