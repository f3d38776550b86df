#include "gridhop/direct.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gridhop/parallel.hpp"

namespace gridhop {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// bins per scan chunk; fixed so results cannot depend on the worker count
constexpr int kScanChunk = 256;

// Fills cre/cim with conj(a(r)) = exp(-j2pi r m / n), m = 0..n-1, by phasor
// recurrence. Exact phases are re-seeded every 1024 steps, which keeps the
// accumulated drift below 1e-10 for any practical n.
void conj_atom(double r, int n, double* cre, double* cim) {
  const double step = -kTwoPi * r / static_cast<double>(n);
  const double wr = std::cos(step), wi = std::sin(step);
  double pr = 1.0, pi = 0.0;
  for (int m = 0; m < n; ++m) {
    if ((m & 1023) == 0) {
      pr = std::cos(step * static_cast<double>(m));
      pi = std::sin(step * static_cast<double>(m));
    }
    cre[m] = pr;
    cim[m] = pi;
    const double nr = pr * wr - pi * wi;
    pi = pr * wi + pi * wr;
    pr = nr;
  }
}

struct Planes {
  Eigen::MatrixXd re, im;  // n_chirps x n_samples
};

Planes split_planes(const CMat& y) {
  Planes p;
  p.re.resize(y.rows(), y.cols());
  p.im.resize(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      p.re(i, j) = y(i, j).real();
      p.im(i, j) = y(i, j).imag();
    }
  return p;
}

}  // namespace

int argmax_index(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("argmax of empty scan");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[static_cast<size_t>(i)] > values[static_cast<size_t>(best)])
      best = i;
  return best;
}

double location_decision(const WaveformConfig& cfg, const SceneGeometry& geom,
                         const FrameSet& frame, const Vec2& x) {
  if (frame.size() != static_cast<size_t>(geom.n_receivers()))
    throw std::invalid_argument("decision: frame/receiver count mismatch");
  const int ms = cfg.n_samples;
  std::vector<double> cre(static_cast<size_t>(ms)), cim(static_cast<size_t>(ms));
  double value = 0.0;
  for (int q = 0; q < geom.n_receivers(); ++q) {
    const double r = sensed_range(cfg, geom, q, x);
    conj_atom(r, ms, cre.data(), cim.data());
    const Eigen::Map<const Eigen::VectorXd> ar(cre.data(), ms);
    const Eigen::Map<const Eigen::VectorXd> ai(cim.data(), ms);
    const CMat& y = frame[static_cast<size_t>(q)];
    for (Eigen::Index m = 0; m < y.rows(); ++m) {
      double zr = 0.0, zi = 0.0;
      for (Eigen::Index s = 0; s < y.cols(); ++s) {
        const cplx ys = y(m, s);
        zr += ys.real() * ar[s] - ys.imag() * ai[s];
        zi += ys.real() * ai[s] + ys.imag() * ar[s];
      }
      value += zr * zr + zi * zi;
    }
  }
  return value;
}

std::vector<double> location_decision_map(const WaveformConfig& cfg,
                                          const SceneGeometry& geom,
                                          const FrameSet& frame,
                                          const LocationGrid& grid,
                                          int n_threads) {
  if (frame.size() != static_cast<size_t>(geom.n_receivers()))
    throw std::invalid_argument("decision: frame/receiver count mismatch");
  if (grid.size() == 0) throw std::invalid_argument("decision: empty grid");
  const int q_count = geom.n_receivers();
  const int mc = cfg.n_chirps;
  const int ms = cfg.n_samples;
  const int n = grid.size();

  std::vector<Planes> planes(static_cast<size_t>(q_count));
  for (int q = 0; q < q_count; ++q)
    planes[static_cast<size_t>(q)] = split_planes(frame[static_cast<size_t>(q)]);

  // sensed ranges for every (receiver, bin) up front; may throw on bins that
  // coincide with a station
  std::vector<std::vector<double>> r_bins(static_cast<size_t>(q_count));
  for (int q = 0; q < q_count; ++q) {
    auto& rq = r_bins[static_cast<size_t>(q)];
    rq.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
      rq[static_cast<size_t>(k)] = sensed_range(cfg, geom, q, grid.point(k));
  }

  std::vector<double> decision(static_cast<size_t>(n), 0.0);
  const int n_chunks = (n + kScanChunk - 1) / kScanChunk;

  parallel_for(n_chunks, n_threads, [&](int chunk) {
    const int b0 = chunk * kScanChunk;
    const int nb = std::min(kScanChunk, n - b0);
    Eigen::MatrixXd cr(ms, nb), ci(ms, nb);
    Eigen::MatrixXd tr(mc, nb), ti(mc, nb);
    for (int q = 0; q < q_count; ++q) {
      const auto& rq = r_bins[static_cast<size_t>(q)];
      for (int j = 0; j < nb; ++j)
        conj_atom(rq[static_cast<size_t>(b0 + j)], ms, cr.col(j).data(),
                  ci.col(j).data());
      const Planes& p = planes[static_cast<size_t>(q)];
      tr.noalias() = p.re * cr;
      tr.noalias() -= p.im * ci;
      ti.noalias() = p.re * ci;
      ti.noalias() += p.im * cr;
      for (int j = 0; j < nb; ++j) {
        double acc = 0.0;
        for (int m = 0; m < mc; ++m)
          acc += tr(m, j) * tr(m, j) + ti(m, j) * ti(m, j);
        decision[static_cast<size_t>(b0 + j)] += acc;
      }
    }
  });
  return decision;
}

namespace {

// Range-compressed slow-time vectors h_q at a fixed location, plus the
// Doppler direction sums; everything the velocity scan needs.
struct VelocityStage {
  std::vector<CVec> h;      // per receiver, length n_chirps
  std::vector<Vec2> dirs;   //  doppler_scale * (u_tx + u_rx)
};

VelocityStage velocity_stage(const WaveformConfig& cfg, const SceneGeometry& geom,
                             const FrameSet& frame, const Vec2& x_hat) {
  const int q_count = geom.n_receivers();
  const int ms = cfg.n_samples;
  VelocityStage st;
  st.h.resize(static_cast<size_t>(q_count));
  st.dirs.resize(static_cast<size_t>(q_count));
  std::vector<double> cre(static_cast<size_t>(ms)), cim(static_cast<size_t>(ms));
  for (int q = 0; q < q_count; ++q) {
    const double r = sensed_range(cfg, geom, q, x_hat);
    conj_atom(r, ms, cre.data(), cim.data());
    CVec ca(ms);
    for (int s = 0; s < ms; ++s) ca[s] = cplx(cre[static_cast<size_t>(s)],
                                              cim[static_cast<size_t>(s)]);
    st.h[static_cast<size_t>(q)] = frame[static_cast<size_t>(q)] * ca;

    const Vec2 from_tx = x_hat - geom.tx;
    const Vec2 from_rx = x_hat - geom.rx[static_cast<size_t>(q)];
    st.dirs[static_cast<size_t>(q)] = cfg.doppler_scale() *
        (from_tx / from_tx.norm() + from_rx / from_rx.norm());
  }
  return st;
}

double velocity_value(const WaveformConfig& cfg, const VelocityStage& st,
                      const Vec2& v, std::vector<double>& cre,
                      std::vector<double>& cim) {
  const int mc = cfg.n_chirps;
  cre.resize(static_cast<size_t>(mc));
  cim.resize(static_cast<size_t>(mc));
  double value = 0.0;
  for (size_t q = 0; q < st.h.size(); ++q) {
    const double u = st.dirs[q].dot(v);
    conj_atom(u, mc, cre.data(), cim.data());
    double zr = 0.0, zi = 0.0;
    const CVec& h = st.h[q];
    for (int m = 0; m < mc; ++m) {
      const cplx hm = h[m];
      zr += hm.real() * cre[static_cast<size_t>(m)] -
            hm.imag() * cim[static_cast<size_t>(m)];
      zi += hm.real() * cim[static_cast<size_t>(m)] +
            hm.imag() * cre[static_cast<size_t>(m)];
    }
    value += zr * zr + zi * zi;
  }
  return value;
}

}  // namespace

double velocity_decision(const WaveformConfig& cfg, const SceneGeometry& geom,
                         const FrameSet& frame, const Vec2& x_hat, const Vec2& v) {
  std::vector<double> cre, cim;
  return velocity_value(cfg, velocity_stage(cfg, geom, frame, x_hat), v, cre,
                        cim);
}

Vec2 direct_velocity(const WaveformConfig& cfg, const SceneGeometry& geom,
                     const FrameSet& frame, const Vec2& x_hat,
                     const VelocityGrid& vgrid) {
  if (vgrid.size() == 0) throw std::invalid_argument("velocity scan: empty grid");
  const VelocityStage st = velocity_stage(cfg, geom, frame, x_hat);
  std::vector<double> cre, cim;
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < vgrid.size(); ++k) {
    const double val = velocity_value(cfg, st, vgrid.point(k), cre, cim);
    if (val > best_value) {
      best_value = val;
      best = k;
    }
  }
  return vgrid.point(best);
}

Estimate direct_estimate(const WaveformConfig& cfg, const SceneGeometry& geom,
                         const FrameSet& frame, const LocationGrid& lgrid,
                         const VelocityGrid& vgrid, int n_threads) {
  using clock = std::chrono::steady_clock;
  Estimate out;
  const auto t0 = clock::now();
  const std::vector<double> decision =
      location_decision_map(cfg, geom, frame, lgrid, n_threads);
  out.x = lgrid.point(argmax_index(decision));
  const auto t1 = clock::now();
  out.v = direct_velocity(cfg, geom, frame, out.x, vgrid);
  const auto t2 = clock::now();
  out.times.stage1_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  out.times.stage2_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
  return out;
}

}  // namespace gridhop
