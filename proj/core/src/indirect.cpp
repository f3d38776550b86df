#include "gridhop/indirect.hpp"

#include <chrono>
#include <stdexcept>

#include "gridhop/fft.hpp"

namespace gridhop {

RangeDopplerMap range_doppler_map(const CMat& frame_rx, int os_range,
                                  int os_doppler) {
  if (os_range < 1 || os_doppler < 1)
    throw std::invalid_argument("range_doppler_map: oversampling must be >= 1");
  const int mc = static_cast<int>(frame_rx.rows());
  const int ms = static_cast<int>(frame_rx.cols());
  const int n_r = os_range * ms;
  const int n_d = os_doppler * mc;

  const CMat spectrum = fft_2d(frame_rx, n_d, n_r);

  RangeDopplerMap map;
  map.os_range = os_range;
  map.os_doppler = os_doppler;
  map.values.resize(n_d, n_r);
  map.range_axis.resize(static_cast<size_t>(n_r));
  map.doppler_axis.resize(static_cast<size_t>(n_d));
  for (int k = 0; k < n_r; ++k)
    map.range_axis[static_cast<size_t>(k)] =
        static_cast<double>(k) / static_cast<double>(os_range);

  // shift so row 0 is the most negative Doppler and the axis is monotone
  const int half = n_d / 2;
  for (int j = 0; j < n_d; ++j) {
    const int src = (j + n_d - half) % n_d;
    map.doppler_axis[static_cast<size_t>(j)] =
        static_cast<double>(j - half) / static_cast<double>(os_doppler);
    map.values.row(j) = spectrum.row(src).cwiseAbs2().array().sqrt();
  }
  return map;
}

RangeDopplerMap::Peak RangeDopplerMap::peak() const {
  if (values.size() == 0)
    throw std::invalid_argument("range_doppler_map: empty map");
  Peak best;
  best.value = -1.0;
  for (int j = 0; j < values.rows(); ++j)
    for (int k = 0; k < values.cols(); ++k)
      if (values(j, k) > best.value) {
        best.value = values(j, k);
        best.row = j;
        best.col = k;
      }
  best.r = range_axis[static_cast<size_t>(best.col)];
  best.u = doppler_axis[static_cast<size_t>(best.row)];
  return best;
}

LatticeFix multilaterate_location(const WaveformConfig& cfg,
                                  const SceneGeometry& geom,
                                  const std::vector<double>& range_bins,
                                  const LocationGrid& grid) {
  if (grid.size() == 0)
    throw std::invalid_argument("multilateration: empty grid");
  if (range_bins.size() != static_cast<size_t>(geom.n_receivers()))
    throw std::invalid_argument("multilateration: one range per receiver required");
  LatticeFix best;
  best.residual = -1.0;
  const int q_count = geom.n_receivers();
  for (int k = 0; k < grid.size(); ++k) {
    const Vec2 x = grid.point(k);
    double res = 0.0;
    for (int q = 0; q < q_count; ++q) {
      const double d = sensed_range(cfg, geom, q, x) -
                       range_bins[static_cast<size_t>(q)];
      res += d * d;
    }
    if (best.residual < 0.0 || res < best.residual) {
      best.residual = res;
      best.index = k;
    }
  }
  best.estimate = grid.point(best.index);
  return best;
}

LatticeFix multilaterate_velocity(const WaveformConfig& cfg,
                                  const SceneGeometry& geom,
                                  const std::vector<double>& doppler_bins,
                                  const Vec2& x_hat, const VelocityGrid& grid) {
  if (grid.size() == 0)
    throw std::invalid_argument("multilateration: empty grid");
  if (doppler_bins.size() != static_cast<size_t>(geom.n_receivers()))
    throw std::invalid_argument(
        "multilateration: one Doppler per receiver required");
  const int q_count = geom.n_receivers();

  // sensed Doppler is linear in v: precompute per-receiver direction sums
  std::vector<Vec2> dirs(static_cast<size_t>(q_count));
  for (int q = 0; q < q_count; ++q) {
    const Vec2 from_tx = x_hat - geom.tx;
    const Vec2 from_rx = x_hat - geom.rx[static_cast<size_t>(q)];
    const double d_tx = from_tx.norm();
    const double d_rx = from_rx.norm();
    if (d_tx == 0.0 || d_rx == 0.0)
      throw std::domain_error(
          "degenerate geometry: target coincides with a station");
    dirs[static_cast<size_t>(q)] =
        cfg.doppler_scale() * (from_tx / d_tx + from_rx / d_rx);
  }

  LatticeFix best;
  best.residual = -1.0;
  for (int k = 0; k < grid.size(); ++k) {
    const Vec2 v = grid.point(k);
    double res = 0.0;
    for (int q = 0; q < q_count; ++q) {
      const double d = dirs[static_cast<size_t>(q)].dot(v) -
                       doppler_bins[static_cast<size_t>(q)];
      res += d * d;
    }
    if (best.residual < 0.0 || res < best.residual) {
      best.residual = res;
      best.index = k;
    }
  }
  best.estimate = grid.point(best.index);
  return best;
}

Estimate indirect_estimate(const WaveformConfig& cfg, const SceneGeometry& geom,
                           const FrameSet& frame, const LocationGrid& lgrid,
                           const VelocityGrid& vgrid, int os_range,
                           int os_doppler) {
  using clock = std::chrono::steady_clock;
  if (frame.size() != static_cast<size_t>(geom.n_receivers()))
    throw std::invalid_argument("indirect: frame/receiver count mismatch");

  Estimate out;
  const auto t0 = clock::now();
  std::vector<double> r_hat(frame.size()), u_hat(frame.size());
  for (size_t q = 0; q < frame.size(); ++q) {
    const auto pk = range_doppler_map(frame[q], os_range, os_doppler).peak();
    r_hat[q] = pk.r;
    u_hat[q] = pk.u;
  }
  const auto t1 = clock::now();
  const LatticeFix loc = multilaterate_location(cfg, geom, r_hat, lgrid);
  const LatticeFix vel =
      multilaterate_velocity(cfg, geom, u_hat, loc.estimate, vgrid);
  const auto t2 = clock::now();

  out.x = loc.estimate;
  out.v = vel.estimate;
  out.times.stage1_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  out.times.stage2_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
  return out;
}

}  // namespace gridhop
