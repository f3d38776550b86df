#include "gridhop/hopping.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gridhop/direct.hpp"
#include "gridhop/fft.hpp"
#include "gridhop/parallel.hpp"

namespace gridhop {

namespace {

constexpr int kScanChunk = 1024;  // bins per hop-scan chunk, worker-independent

void check_table(const std::vector<CMat>& spectra, const HopTable& table) {
  if (static_cast<int>(spectra.size()) != table.n_rx)
    throw std::runtime_error("stale hop table (receiver count mismatch)");
  for (const CMat& z : spectra)
    if (static_cast<int>(z.cols()) != table.n_samples * table.os_range)
      throw std::runtime_error("stale hop table (spectrum width mismatch)");
}

// Spectra split into column-major re/im planes (n_chirps x n_fft): one FFT
// bin's slow-time samples become a contiguous column, which is what the hop
// scan streams over.
struct SpectraPlanes {
  std::vector<Eigen::MatrixXd> re, im;
  int n_chirps = 0;
};

SpectraPlanes split_planes(const std::vector<CMat>& spectra) {
  SpectraPlanes p;
  p.re.resize(spectra.size());
  p.im.resize(spectra.size());
  for (size_t q = 0; q < spectra.size(); ++q) {
    const CMat& z = spectra[q];
    p.n_chirps = static_cast<int>(z.rows());
    Eigen::MatrixXd re(z.rows(), z.cols()), im(z.rows(), z.cols());
    for (Eigen::Index m = 0; m < z.rows(); ++m)
      for (Eigen::Index i = 0; i < z.cols(); ++i) {
        re(m, i) = z(m, i).real();
        im(m, i) = z(m, i).imag();
      }
    p.re[q] = std::move(re);
    p.im[q] = std::move(im);
  }
  return p;
}

// scratch for one combined slow-time vector; hoisted so a scan allocates
// once per worker, not once per bin
struct ComboBuf {
  Eigen::VectorXd vr, vi;
  explicit ComboBuf(int mc) : vr(mc), vi(mc) {}
};

double hop_bin_value(const SpectraPlanes& planes, const HopTable& table,
                     int bin, ComboBuf& buf) {
  double value = 0.0;
  for (int q = 0; q < table.n_rx; ++q) {
    const size_t at = table.entry_offset(bin, q);
    const Eigen::MatrixXd& re = planes.re[static_cast<size_t>(q)];
    const Eigen::MatrixXd& im = planes.im[static_cast<size_t>(q)];
    const double c0r = table.coeffs[at].real(), c0i = table.coeffs[at].imag();
    const auto z0r = re.col(table.indices[at]);
    const auto z0i = im.col(table.indices[at]);
    switch (table.k) {
      case 1:
        buf.vr.noalias() = c0r * z0r - c0i * z0i;
        buf.vi.noalias() = c0r * z0i + c0i * z0r;
        break;
      case 2: {
        const double c1r = table.coeffs[at + 1].real(),
                     c1i = table.coeffs[at + 1].imag();
        const auto z1r = re.col(table.indices[at + 1]);
        const auto z1i = im.col(table.indices[at + 1]);
        buf.vr.noalias() = c0r * z0r - c0i * z0i + c1r * z1r - c1i * z1i;
        buf.vi.noalias() = c0r * z0i + c0i * z0r + c1r * z1i + c1i * z1r;
        break;
      }
      default: {
        const double c1r = table.coeffs[at + 1].real(),
                     c1i = table.coeffs[at + 1].imag();
        const double c2r = table.coeffs[at + 2].real(),
                     c2i = table.coeffs[at + 2].imag();
        const auto z1r = re.col(table.indices[at + 1]);
        const auto z1i = im.col(table.indices[at + 1]);
        const auto z2r = re.col(table.indices[at + 2]);
        const auto z2i = im.col(table.indices[at + 2]);
        buf.vr.noalias() =
            c0r * z0r - c0i * z0i + c1r * z1r - c1i * z1i + c2r * z2r - c2i * z2i;
        buf.vi.noalias() =
            c0r * z0i + c0i * z0r + c1r * z1i + c1i * z1r + c2r * z2i + c2i * z2r;
        break;
      }
    }
    value += buf.vr.squaredNorm() + buf.vi.squaredNorm();
  }
  return value;
}

std::vector<double> scan_planes(const SpectraPlanes& planes,
                                const HopTable& table, int n_threads) {
  std::vector<double> decision(static_cast<size_t>(table.n_bins), 0.0);
  const int n_chunks = (table.n_bins + kScanChunk - 1) / kScanChunk;
  parallel_for(n_chunks, n_threads, [&](int chunk) {
    ComboBuf buf(planes.n_chirps);
    const int b0 = chunk * kScanChunk;
    const int b1 = std::min(b0 + kScanChunk, table.n_bins);
    for (int bin = b0; bin < b1; ++bin)
      decision[static_cast<size_t>(bin)] =
          hop_bin_value(planes, table, bin, buf);
  });
  return decision;
}

}  // namespace

std::vector<CMat> fast_time_spectra(const FrameSet& frame, int os_range) {
  if (os_range < 1)
    throw std::invalid_argument("spectra: oversampling must be >= 1");
  std::vector<CMat> spectra(frame.size());
  for (size_t q = 0; q < frame.size(); ++q)
    spectra[q] =
        fft_rows(frame[q], os_range * static_cast<int>(frame[q].cols()));
  return spectra;
}

double hop_location_decision(const std::vector<CMat>& spectra,
                             const HopTable& table, int bin) {
  check_table(spectra, table);
  if (bin < 0 || bin >= table.n_bins)
    throw std::invalid_argument("hop decision: bin out of range");

  // split only the k columns this bin touches, then run the scan kernel on
  // the one-bin view; same expression, so it matches hop_decision_map
  // bit for bit without paying for whole-spectra planes
  const int mc = static_cast<int>(spectra.front().rows());
  SpectraPlanes planes;
  planes.n_chirps = mc;
  planes.re.resize(spectra.size());
  planes.im.resize(spectra.size());

  HopTable view;
  view.scheme = table.scheme;
  view.k = table.k;
  view.os_range = table.os_range;
  view.n_bins = 1;
  view.n_rx = table.n_rx;
  view.n_samples = table.n_samples;
  view.indices.resize(static_cast<size_t>(table.n_rx) *
                      static_cast<size_t>(table.k));
  view.coeffs.resize(view.indices.size());

  for (int q = 0; q < table.n_rx; ++q) {
    const size_t at = table.entry_offset(bin, q);
    const CMat& z = spectra[static_cast<size_t>(q)];
    Eigen::MatrixXd re(mc, table.k), im(mc, table.k);
    for (int j = 0; j < table.k; ++j) {
      const size_t vt = view.entry_offset(0, q) + static_cast<size_t>(j);
      view.indices[vt] = static_cast<uint32_t>(j);
      view.coeffs[vt] = table.coeffs[at + static_cast<size_t>(j)];
      const auto col = z.col(table.indices[at + static_cast<size_t>(j)]);
      for (int m = 0; m < mc; ++m) {
        re(m, j) = col(m).real();
        im(m, j) = col(m).imag();
      }
    }
    planes.re[static_cast<size_t>(q)] = std::move(re);
    planes.im[static_cast<size_t>(q)] = std::move(im);
  }

  ComboBuf buf(mc);
  return hop_bin_value(planes, view, 0, buf);
}

std::vector<double> hop_decision_map(const std::vector<CMat>& spectra,
                                     const HopTable& table, int n_threads) {
  check_table(spectra, table);
  return scan_planes(split_planes(spectra), table, n_threads);
}

Vec2 hop_velocity(const WaveformConfig& cfg, const SceneGeometry& geom,
                  const FrameSet& frame, const Vec2& x_hat,
                  const VelocityGrid& vgrid, int os_doppler) {
  if (os_doppler < 1)
    throw std::invalid_argument("hop velocity: oversampling must be >= 1");
  if (vgrid.size() == 0)
    throw std::invalid_argument("hop velocity: empty grid");
  const int q_count = geom.n_receivers();
  const int n_d = os_doppler * cfg.n_chirps;

  // exact range compression at the located point, then one Doppler power
  // spectrum per receiver
  std::vector<Eigen::VectorXd> power(static_cast<size_t>(q_count));
  std::vector<Vec2> dirs(static_cast<size_t>(q_count));
  for (int q = 0; q < q_count; ++q) {
    const double r = sensed_range(cfg, geom, q, x_hat);
    const CVec ca = range_atom(r, cfg.n_samples).conjugate();
    CMat h(1, cfg.n_chirps);
    h.row(0) = (frame[static_cast<size_t>(q)] * ca).transpose();
    const CMat spec = fft_rows(h, n_d);
    Eigen::VectorXd p(n_d);
    for (int i = 0; i < n_d; ++i) p[i] = std::norm(spec(0, i));
    power[static_cast<size_t>(q)] = std::move(p);

    const Vec2 from_tx = x_hat - geom.tx;
    const Vec2 from_rx = x_hat - geom.rx[static_cast<size_t>(q)];
    const double d_tx = from_tx.norm(), d_rx = from_rx.norm();
    if (d_tx == 0.0 || d_rx == 0.0)
      throw std::domain_error(
          "degenerate geometry: target coincides with a station");
    dirs[static_cast<size_t>(q)] =
        cfg.doppler_scale() * (from_tx / d_tx + from_rx / d_rx);
  }

  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < vgrid.size(); ++k) {
    const Vec2 v = vgrid.point(k);
    double value = 0.0;
    for (int q = 0; q < q_count; ++q) {
      const double u = dirs[static_cast<size_t>(q)].dot(v);
      const long bin = std::lround(u * static_cast<double>(os_doppler));
      const int idx = static_cast<int>(((bin % n_d) + n_d) % n_d);
      value += power[static_cast<size_t>(q)][idx];
    }
    if (value > best_value) {
      best_value = value;
      best = k;
    }
  }
  return vgrid.point(best);
}

Estimate hop_estimate(const WaveformConfig& cfg, const SceneGeometry& geom,
                      const FrameSet& frame, const HopTable& table,
                      const LocationGrid& lgrid, const VelocityGrid& vgrid,
                      int os_doppler, int n_threads) {
  using clock = std::chrono::steady_clock;
  if (table.hash != scene_hash(cfg, geom))
    throw std::runtime_error("stale hop table (scene hash mismatch)");
  if (table.n_bins != lgrid.size())
    throw std::runtime_error("stale hop table (grid size mismatch)");
  if (frame.size() != static_cast<size_t>(geom.n_receivers()))
    throw std::invalid_argument("hop: frame/receiver count mismatch");
  for (const CMat& y : frame)
    if (y.rows() != cfg.n_chirps || y.cols() != cfg.n_samples)
      throw std::invalid_argument("hop: frame shape mismatch");

  Estimate out;
  const auto t0 = clock::now();
  // spectra computed straight into scan layout: FFT bins as contiguous
  // columns, re/im split
  SpectraPlanes planes;
  planes.re.resize(frame.size());
  planes.im.resize(frame.size());
  planes.n_chirps = cfg.n_chirps;
  for (size_t q = 0; q < frame.size(); ++q)
    fft_rows_split(frame[q],
                   table.os_range * static_cast<int>(frame[q].cols()),
                   planes.re[q], planes.im[q]);
  const auto t1 = clock::now();
  const std::vector<double> decision = scan_planes(planes, table, n_threads);
  out.x = lgrid.point(argmax_index(decision));
  out.v = hop_velocity(cfg, geom, frame, out.x, vgrid, os_doppler);
  const auto t2 = clock::now();
  out.times.stage1_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  out.times.stage2_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
  return out;
}

}  // namespace gridhop
