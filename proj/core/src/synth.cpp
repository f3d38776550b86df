#include "gridhop/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "gridhop/rng.hpp"

namespace gridhop {

double NoiseSpec::sigma() const {
  if (!snr_db) return 0.0;
  return std::abs(alpha_ref) * std::pow(10.0, -*snr_db / 20.0);
}

FrameSet synthesize_frame(const WaveformConfig& cfg, const SceneGeometry& geom,
                          const std::vector<Target>& targets) {
  cfg.validate();
  geom.validate();
  const int q_count = geom.n_receivers();
  FrameSet frame(static_cast<size_t>(q_count));
  for (int q = 0; q < q_count; ++q)
    frame[static_cast<size_t>(q)] = CMat::Zero(cfg.n_chirps, cfg.n_samples);

  for (const Target& t : targets) {
    for (int q = 0; q < q_count; ++q) {
      const SensedParams s = sense(cfg, geom, q, t.x, t.v);
      if (!(s.r >= 0.0 && s.r < static_cast<double>(cfg.n_samples)) ||
          !(std::abs(s.u) < static_cast<double>(cfg.n_chirps) / 2.0))
        throw std::runtime_error("scene outside unambiguous window");
      const CVec a = range_atom(s.r, cfg.n_samples);
      const CVec b = doppler_atom(s.u, cfg.n_chirps);
      frame[static_cast<size_t>(q)].noalias() +=
          t.alpha * (b * a.transpose());
    }
  }
  return frame;
}

void add_noise(FrameSet& frame, const NoiseSpec& noise, uint64_t trial) {
  const double sigma = noise.sigma();
  if (sigma == 0.0) return;
  for (size_t q = 0; q < frame.size(); ++q) {
    Rng rng(substream(noise.seed, trial, q));
    CMat& y = frame[q];
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      for (Eigen::Index j = 0; j < y.cols(); ++j)
        y(i, j) += rng.complex_gaussian(sigma);
  }
}

FrameSet synthesize_frame(const WaveformConfig& cfg, const SceneGeometry& geom,
                          const std::vector<Target>& targets,
                          const NoiseSpec& noise, uint64_t trial) {
  FrameSet frame = synthesize_frame(cfg, geom, targets);
  add_noise(frame, noise, trial);
  return frame;
}

namespace {

Vec2 rotate(const Vec2& p, double angle) {
  const double cs = std::cos(angle), sn = std::sin(angle);
  return {cs * p.x() - sn * p.y(), sn * p.x() + cs * p.y()};
}

}  // namespace

OnGridScene make_ongrid_scene(const WaveformConfig& cfg, int n_receivers,
                              const LocationGrid& lgrid, const VelocityGrid& vgrid,
                              uint64_t seed, uint64_t trial, double min_range_m,
                              double max_range_m) {
  cfg.validate();
  if (n_receivers < 2)
    throw std::invalid_argument("ongrid scene: at least two receivers required");
  Rng rng(substream(seed, trial, 0xabcdull));

  OnGridScene scene;
  scene.loc_index = rng.below(lgrid.size());
  scene.target.x = lgrid.point(scene.loc_index);
  scene.target.alpha = std::polar(1.0, rng.uniform(0.0, 6.283185307179586));

  const Vec2 x = scene.target.x;
  const double kappa = cfg.doppler_scale();
  const double bins_per_m = cfg.range_scale();
  const double u_cap = static_cast<double>(cfg.n_chirps) / 2.0 - 2.0;

  // TX placed off the grid along a fixed offset from x; its exact position
  // only enters through distance and direction, both fine anywhere distinct.
  scene.geom.tx = x - Vec2(min_range_m + 3.0, min_range_m + 2.0);
  const Vec2 from_tx = x - scene.geom.tx;
  const double d_tx = from_tx.norm();

  // Keep two bins of slack under the aliasing limits — for the whole grid,
  // not just the target: exact-recovery runs build hop tables over every
  // bin, so the worst detour through a grid corner must stay in-window too.
  double corner_d = 0.0;
  for (int k : {0, lgrid.nx - 1, (lgrid.ny - 1) * lgrid.nx, lgrid.size() - 1})
    corner_d = std::max(corner_d, (lgrid.point(k) - x).norm());
  const double r_hi =
      std::min(max_range_m, (static_cast<double>(cfg.n_samples) - 2.0) / bins_per_m -
                                d_tx - 2.0 * corner_d);
  const int n_r_lo = static_cast<int>(std::ceil(bins_per_m * (d_tx + min_range_m)));
  const int n_r_hi = static_cast<int>(std::floor(bins_per_m * (d_tx + r_hi)));
  if (n_r_hi < n_r_lo)
    throw std::runtime_error("ongrid scene: no integer range bin in window");

  for (int attempt = 0; attempt < 64; ++attempt) {
    // a velocity lattice point with respectable speed, so the Doppler
    // geometry below has room to steer
    for (int tries = 0;; ++tries) {
      scene.vel_index = rng.below(vgrid.size());
      scene.target.v = vgrid.point(scene.vel_index);
      if (scene.target.v.norm() >= 1.0) break;
      if (tries > 256)
        throw std::runtime_error("ongrid scene: velocity grid too coarse/small");
    }
    const Vec2 v = scene.target.v;
    const double speed = v.norm();
    const double t_tx = (from_tx / d_tx).dot(v);

    scene.geom.rx.clear();
    std::vector<int> doppler_bins;
    bool placed = true;
    for (int q = 0; q < n_receivers && placed; ++q) {
      int tries = 0;
      for (;; ++tries) {
        if (tries > 256) {
          placed = false;
          break;
        }
        const int n_r = n_r_lo + rng.below(n_r_hi - n_r_lo + 1);
        const double d_q = static_cast<double>(n_r) / bins_per_m - d_tx;

        // pick an integer Doppler bin reachable by steering the RX direction:
        // u = kappa*(t_tx + <u_rx, v>), and <u_rx, v> spans [-0.95, 0.95]*speed
        const double lo = std::max(-u_cap, kappa * (t_tx - 0.95 * speed));
        const double hi = std::min(u_cap, kappa * (t_tx + 0.95 * speed));
        const int n_u_lo = static_cast<int>(std::ceil(lo));
        const int n_u_hi = static_cast<int>(std::floor(hi));
        if (n_u_hi < n_u_lo) continue;
        const int n_u = n_u_lo + rng.below(n_u_hi - n_u_lo + 1);

        const double want = static_cast<double>(n_u) / kappa - t_tx;  // <u_rx, v>
        const double cos_theta = want / speed;
        if (std::abs(cos_theta) > 0.95) continue;
        const double theta = std::acos(cos_theta);
        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        const Vec2 u_rx = rotate(v / speed, sign * theta);
        const Vec2 rx = x - d_q * u_rx;

        bool distinct = (rx - scene.geom.tx).norm() > 1e-6;
        for (const Vec2& other : scene.geom.rx)
          distinct = distinct && (rx - other).norm() > 1e-6;
        if (!distinct) continue;

        scene.geom.rx.push_back(rx);
        doppler_bins.push_back(n_u);
        break;
      }
    }
    if (!placed) continue;

    // Nearest-bin Doppler readout quantizes velocities: if a smaller-index
    // lattice velocity rounds to the same bin at every receiver it would win
    // the argmax tie. Reject such scenes so single-index Doppler hopping is
    // exact on them too.
    std::vector<Vec2> dirs(static_cast<size_t>(n_receivers));
    for (int q = 0; q < n_receivers; ++q) {
      const Vec2 from_rx = x - scene.geom.rx[static_cast<size_t>(q)];
      dirs[static_cast<size_t>(q)] =
          kappa * (from_tx / d_tx + from_rx / from_rx.norm());
    }
    bool clash = false;
    for (int k = 0; k < scene.vel_index && !clash; ++k) {
      const Vec2 cand = vgrid.point(k);
      bool same_cell = true;
      for (int q = 0; q < n_receivers && same_cell; ++q) {
        const double du = dirs[static_cast<size_t>(q)].dot(cand) -
                          static_cast<double>(doppler_bins[static_cast<size_t>(q)]);
        same_cell = std::abs(du) <= 0.5 + 1e-6;
      }
      clash = same_cell;
    }
    if (clash) continue;

    scene.geom.validate();
    return scene;
  }
  throw std::runtime_error("ongrid scene: construction failed");
}

}  // namespace gridhop
