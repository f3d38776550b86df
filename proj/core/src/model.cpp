#include "gridhop/model.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace gridhop {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void WaveformConfig::validate() const {
  check(std::isfinite(f0) && f0 > 0.0, "waveform: f0 must be positive");
  check(std::isfinite(bandwidth) && bandwidth > 0.0,
        "waveform: bandwidth must be positive");
  check(std::isfinite(chirp_duration) && chirp_duration > 0.0,
        "waveform: chirp_duration must be positive");
  check(n_chirps >= 2, "waveform: n_chirps must be >= 2");
  check(n_samples >= 2, "waveform: n_samples must be >= 2");
  check(std::isfinite(c) && c > 0.0, "waveform: c must be positive");
  check(std::isfinite(range_resolution()) && range_resolution() > 0.0,
        "waveform: range resolution must be finite and positive");
}

void SceneGeometry::validate() const {
  check(rx.size() >= 2, "geometry: at least two receivers required");
  for (size_t i = 0; i < rx.size(); ++i) {
    check(rx[i].allFinite(), "geometry: receiver position must be finite");
    if ((rx[i] - tx).norm() == 0.0)
      throw std::invalid_argument("geometry: receiver coincides with TX");
    for (size_t j = i + 1; j < rx.size(); ++j)
      if ((rx[i] - rx[j]).norm() == 0.0)
        throw std::invalid_argument("geometry: receivers coincide");
  }
  check(tx.allFinite(), "geometry: TX position must be finite");
}

double sensed_range(const WaveformConfig& cfg, const SceneGeometry& geom, int q,
                    const Vec2& x) {
  const double d_tx = (x - geom.tx).norm();
  const double d_rx = (x - geom.rx[static_cast<size_t>(q)]).norm();
  if (d_tx == 0.0 || d_rx == 0.0)
    throw std::domain_error("degenerate geometry: target coincides with a station");
  return cfg.range_scale() * (d_tx + d_rx);
}

double sensed_doppler(const WaveformConfig& cfg, const SceneGeometry& geom, int q,
                      const Vec2& x, const Vec2& v) {
  const Vec2 from_tx = x - geom.tx;
  const Vec2 from_rx = x - geom.rx[static_cast<size_t>(q)];
  const double d_tx = from_tx.norm();
  const double d_rx = from_rx.norm();
  if (d_tx == 0.0 || d_rx == 0.0)
    throw std::domain_error("degenerate geometry: target coincides with a station");
  const Vec2 dir_sum = from_tx / d_tx + from_rx / d_rx;
  return cfg.doppler_scale() * dir_sum.dot(v);
}

SensedParams sense(const WaveformConfig& cfg, const SceneGeometry& geom, int q,
                   const Vec2& x, const Vec2& v) {
  return {sensed_range(cfg, geom, q, x), sensed_doppler(cfg, geom, q, x, v)};
}

CVec range_atom(double r, int n_samples) {
  CVec a(n_samples);
  const double step = kTwoPi * r / static_cast<double>(n_samples);
  for (int m = 0; m < n_samples; ++m)
    a[m] = std::polar(1.0, step * static_cast<double>(m));
  return a;
}

CVec doppler_atom(double u, int n_chirps) {
  CVec b(n_chirps);
  const double step = kTwoPi * u / static_cast<double>(n_chirps);
  for (int m = 0; m < n_chirps; ++m)
    b[m] = std::polar(1.0, step * static_cast<double>(m));
  return b;
}

namespace {

// floor(extent/spacing) + 1 bins per axis; the epsilon absorbs cases like
// 3.0/0.6 landing a hair below an integer.
int axis_count(double extent, double spacing) {
  return static_cast<int>(std::floor(extent / spacing + 1e-9)) + 1;
}

}  // namespace

LocationGrid LocationGrid::build(const WaveformConfig& cfg, const Vec2& origin,
                                 const Vec2& extent, double density) {
  check(std::isfinite(density) && density > 0.0,
        "location grid: density must be positive");
  check(extent.x() > 0.0 && extent.y() > 0.0,
        "location grid: extents must be positive");
  LocationGrid g;
  g.origin = origin;
  g.spacing = cfg.range_resolution() / density;
  g.nx = axis_count(extent.x(), g.spacing);
  g.ny = axis_count(extent.y(), g.spacing);
  return g;
}

Vec2 LocationGrid::point(int k) const {
  return origin + spacing * Vec2(static_cast<double>(k % nx),
                                 static_cast<double>(k / nx));
}

VelocityGrid VelocityGrid::build(const WaveformConfig& cfg, double speed_bound,
                                 double density) {
  check(std::isfinite(density) && density > 0.0,
        "velocity grid: density must be positive");
  check(std::isfinite(speed_bound) && speed_bound > 0.0,
        "velocity grid: speed bound must be positive");
  VelocityGrid g;
  g.spacing = cfg.speed_resolution() / density;
  g.half = static_cast<int>(std::floor(speed_bound / g.spacing + 1e-9));
  return g;
}

Vec2 VelocityGrid::point(int k) const {
  const int n = per_axis();
  return spacing * Vec2(static_cast<double>(k % n - half),
                        static_cast<double>(k / n - half));
}

namespace {

struct Fnv1a {
  uint64_t h = 1469598103934665603ull;
  void feed(const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  }
  void feed_u32(uint32_t v) { feed(&v, sizeof v); }
  void feed_f64(double v) { feed(&v, sizeof v); }
};

}  // namespace

uint64_t scene_hash(const WaveformConfig& cfg, const SceneGeometry& geom) {
  Fnv1a f;
  f.feed_u32(static_cast<uint32_t>(geom.n_receivers()));
  f.feed_u32(static_cast<uint32_t>(cfg.n_chirps));
  f.feed_u32(static_cast<uint32_t>(cfg.n_samples));
  f.feed_f64(cfg.f0);
  f.feed_f64(cfg.bandwidth);
  f.feed_f64(cfg.chirp_duration);
  f.feed_f64(geom.tx.x());
  f.feed_f64(geom.tx.y());
  for (const Vec2& p : geom.rx) {
    f.feed_f64(p.x());
    f.feed_f64(p.y());
  }
  return f.h;
}

}  // namespace gridhop
