#pragma once

#include <string>
#include <vector>

#include "gridhop/model.hpp"
#include "gridhop/synth.hpp"

namespace gridhop {

// MRF1 capture container (little-endian):
//   magic "MRF1", u32 version, Q, Mc, Ms, frame count,
//   f64 f0, bandwidth, chirp_duration,
//   (Q+1) coordinate pairs as f64 (TX first, then each RX),
//   frames receiver-major, each matrix row-major, entries as re,im f64 pairs.
// Propagation speed is not stored; readers get the library default.
struct Capture {
  WaveformConfig cfg;
  SceneGeometry geom;
  std::vector<FrameSet> frames;
};

void write_frames(const std::string& path, const WaveformConfig& cfg,
                  const SceneGeometry& geom,
                  const std::vector<FrameSet>& frames);

Capture read_frames(const std::string& path);

// Ground-truth track: text lines "t,x0,x1,v0,v1", '#' comments, times
// strictly increasing.
struct TruthSample {
  double t = 0.0;
  Vec2 x = Vec2::Zero();
  Vec2 v = Vec2::Zero();
};

std::vector<TruthSample> read_truth_track(const std::string& path);
void write_truth_track(const std::string& path,
                       const std::vector<TruthSample>& track);

}  // namespace gridhop
