#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gridhop {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using CVec = Eigen::VectorXcd;
// Row-major so each chirp's fast-time samples sit contiguously; both the FFT
// wrappers and the scan kernels rely on that.
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kSpeedOfLight = 299792458.0;

// Chirp/sampling constants of one FMCW frame.
struct WaveformConfig {
  double f0 = 24.0e9;            // carrier, Hz
  double bandwidth = 250.0e6;    // sweep bandwidth, Hz
  double chirp_duration = 128.0e-6;  // s
  int n_chirps = 128;            // slow-time length (rows of a frame)
  int n_samples = 128;           // fast-time length (columns of a frame)
  double c = kSpeedOfLight;      // propagation speed, m/s

  void validate() const;

  double range_resolution() const { return c / (2.0 * bandwidth); }
  double speed_resolution() const {
    return c / (2.0 * f0 * chirp_duration * static_cast<double>(n_chirps));
  }
  // fast-time bins per metre of summed TX->target->RX path
  double range_scale() const { return bandwidth / c; }
  // slow-time bins per (m/s) of bistatic closing speed
  double doppler_scale() const {
    return f0 * chirp_duration * static_cast<double>(n_chirps) / c;
  }
};

// One TX and Q >= 2 RX stations on a 2D ground plane.
struct SceneGeometry {
  Vec2 tx = Vec2::Zero();
  std::vector<Vec2> rx;

  int n_receivers() const { return static_cast<int>(rx.size()); }
  void validate() const;
};

struct Target {
  Vec2 x = Vec2::Zero();   // location, m
  Vec2 v = Vec2::Zero();   // velocity, m/s
  cplx alpha{1.0, 0.0};    // scattering coefficient
};

// Per-receiver sensed parameters, both in FFT-bin units.
struct SensedParams {
  double r = 0.0;  // fast-time bins; alias-free scenes keep 0 <= r < n_samples
  double u = 0.0;  // slow-time bins; alias-free scenes keep |u| < n_chirps/2
};

// Summed-path range seen by receiver q, in fast-time bins.
double sensed_range(const WaveformConfig& cfg, const SceneGeometry& geom, int q,
                    const Vec2& x);
// Bistatic Doppler seen by receiver q, in slow-time bins.
double sensed_doppler(const WaveformConfig& cfg, const SceneGeometry& geom, int q,
                      const Vec2& x, const Vec2& v);
SensedParams sense(const WaveformConfig& cfg, const SceneGeometry& geom, int q,
                   const Vec2& x, const Vec2& v);

// Steering vectors: a_m(r) = exp(j2pi r m / n), unit modulus, squared norm n.
CVec range_atom(double r, int n_samples);
CVec doppler_atom(double u, int n_chirps);

// Uniform rectangular lattice over [origin, origin+extent], spacing =
// range_resolution/density on both axes, x index fastest.
struct LocationGrid {
  Vec2 origin = Vec2::Zero();
  double spacing = 1.0;
  int nx = 0, ny = 0;

  static LocationGrid build(const WaveformConfig& cfg, const Vec2& origin,
                            const Vec2& extent, double density);

  int size() const { return nx * ny; }
  // out of line on purpose: exact-recovery equality needs every caller to see
  // bit-identical lattice points, so there must be a single compiled rounding
  // (inline + FMA contraction can differ between translation units)
  Vec2 point(int k) const;
};

// Square lattice centred on the origin covering [-bound, bound]^2, spacing =
// speed_resolution/density; the origin itself is always a lattice point.
struct VelocityGrid {
  double spacing = 1.0;
  int half = 0;  // points per axis = 2*half + 1

  static VelocityGrid build(const WaveformConfig& cfg, double speed_bound,
                            double density);

  int per_axis() const { return 2 * half + 1; }
  int size() const { return per_axis() * per_axis(); }
  Vec2 point(int k) const;  // out of line, same reason as LocationGrid::point
};

// FNV-1a over the waveform constants and station coordinates; binds hop
// tables to the frames they were built for. Byte order is the host's
// (all file formats here are little-endian).
uint64_t scene_hash(const WaveformConfig& cfg, const SceneGeometry& geom);

}  // namespace gridhop
