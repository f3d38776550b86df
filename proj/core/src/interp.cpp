#include "gridhop/interp.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "gridhop/parallel.hpp"

namespace gridhop {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr uint32_t kTableVersion = 1;

// D(delta) = sum_m exp(j2pi delta m / n) — the atom autocorrelation kernel.
// Direct n-term summation via phasor recurrence (re-seeded like the scan
// atoms); table construction cost is dominated by these sums.
cplx atom_kernel(double delta, int n) {
  const double step = kTwoPi * delta / static_cast<double>(n);
  const double wr = std::cos(step), wi = std::sin(step);
  double pr = 1.0, pim = 0.0, re = 0.0, im = 0.0;
  for (int m = 0; m < n; ++m) {
    if ((m & 1023) == 0) {
      pr = std::cos(step * static_cast<double>(m));
      pim = std::sin(step * static_cast<double>(m));
    }
    re += pr;
    im += pim;
    const double nr = pr * wr - pim * wi;
    pim = pr * wi + pim * wr;
    pr = nr;
  }
  return {re, im};
}

double wrap_range(double r, int n) {
  double w = std::fmod(r, static_cast<double>(n));
  if (w < 0.0) w += static_cast<double>(n);
  if (w >= static_cast<double>(n)) w = 0.0;
  return w;
}

}  // namespace

int scheme_order(InterpScheme s) { return static_cast<int>(s); }

std::string_view scheme_name(InterpScheme s) {
  switch (s) {
    case InterpScheme::nearest: return "nearest";
    case InterpScheme::linear: return "linear";
    case InterpScheme::poly3: return "poly3";
  }
  throw std::invalid_argument("unknown interpolation scheme");
}

InterpScheme scheme_from_name(std::string_view name) {
  if (name == "nearest") return InterpScheme::nearest;
  if (name == "linear") return InterpScheme::linear;
  if (name == "poly3") return InterpScheme::poly3;
  throw std::invalid_argument(
      "unknown interpolation scheme '" + std::string(name) +
      "' (valid: nearest, linear, poly3)");
}

std::vector<double> fft_range_grid(int n_samples, int os_range) {
  if (n_samples < 1 || os_range < 1)
    throw std::invalid_argument("fft_range_grid: sizes must be positive");
  std::vector<double> grid(static_cast<size_t>(n_samples) *
                           static_cast<size_t>(os_range));
  for (size_t i = 0; i < grid.size(); ++i)
    grid[i] = static_cast<double>(i) / static_cast<double>(os_range);
  return grid;
}

AtomFit fit_atom(int n_samples, int os_range, double r, InterpScheme scheme) {
  if (n_samples < 2 || os_range < 1)
    throw std::invalid_argument("fit_atom: bad sizes");
  const int n_fft = n_samples * os_range;
  const double rw = wrap_range(r, n_samples);
  const double pos = rw * static_cast<double>(os_range);  // in FFT-grid steps

  AtomFit fit;
  fit.k = scheme_order(scheme);

  switch (scheme) {
    case InterpScheme::nearest: {
      const auto i = static_cast<long>(std::llround(pos)) % n_fft;
      fit.indices[0] = static_cast<uint32_t>(i);
      fit.coeffs[0] = 1.0;
      break;
    }
    case InterpScheme::linear: {
      const auto i0 = static_cast<long>(std::floor(pos));
      const double t = pos - static_cast<double>(i0);
      fit.indices[0] = static_cast<uint32_t>(i0 % n_fft);
      fit.indices[1] = static_cast<uint32_t>((i0 + 1) % n_fft);
      fit.coeffs[0] = 1.0 - t;
      fit.coeffs[1] = t;
      break;
    }
    case InterpScheme::poly3: {
      const auto i = static_cast<long>(std::llround(pos));
      fit.indices[0] = static_cast<uint32_t>((i - 1 + n_fft) % n_fft);
      fit.indices[1] = static_cast<uint32_t>(i % n_fft);
      fit.indices[2] = static_cast<uint32_t>((i + 1) % n_fft);
      break;
    }
  }

  // grid positions of the chosen atoms
  std::array<double, 3> rbar{};
  for (int j = 0; j < fit.k; ++j)
    rbar[static_cast<size_t>(j)] =
        static_cast<double>(fit.indices[static_cast<size_t>(j)]) /
        static_cast<double>(os_range);

  // Gram matrix of the atoms and their correlations with a(rw)
  Eigen::Matrix3cd gram = Eigen::Matrix3cd::Identity();
  Eigen::Vector3cd rhs = Eigen::Vector3cd::Zero();
  for (int j = 0; j < fit.k; ++j) {
    rhs[j] = atom_kernel(rbar[static_cast<size_t>(j)] - rw, n_samples);
    for (int l = 0; l < fit.k; ++l)
      gram(j, l) = atom_kernel(
          rbar[static_cast<size_t>(j)] - rbar[static_cast<size_t>(l)], n_samples);
  }

  if (scheme == InterpScheme::poly3) {
    Eigen::Matrix3cd g = gram;
    Eigen::LLT<Eigen::Matrix3cd> llt(g);
    if (llt.info() != Eigen::Success) {
      // adjacent atoms nearly parallel at large oversampling: regularize
      g.diagonal().array() += 1e-12 * gram.trace().real();
      llt.compute(g);
    }
    Eigen::Vector3cd c;
    if (llt.info() == Eigen::Success)
      c = llt.solve(rhs);
    else
      c = g.fullPivLu().solve(rhs);
    for (int j = 0; j < 3; ++j) fit.coeffs[static_cast<size_t>(j)] = c[j];
  }

  // residual^2 = n - 2 Re(c^H b) + c^H G c, clipped at 0 for on-grid fits
  Eigen::Vector3cd c = Eigen::Vector3cd::Zero();
  for (int j = 0; j < fit.k; ++j) c[j] = fit.coeffs[static_cast<size_t>(j)];
  const double quad = (c.adjoint() * gram * c).value().real();
  const double cross = (c.adjoint() * rhs).value().real();
  fit.residual = std::sqrt(
      std::max(0.0, static_cast<double>(n_samples) - 2.0 * cross + quad));
  return fit;
}

HopTable precompute_hop_table(const WaveformConfig& cfg, const SceneGeometry& geom,
                              const LocationGrid& grid, InterpScheme scheme,
                              int os_range, int n_threads) {
  cfg.validate();
  geom.validate();
  if (os_range < 1)
    throw std::invalid_argument("hop table: oversampling must be >= 1");
  if (grid.size() == 0) throw std::invalid_argument("hop table: empty grid");

  HopTable table;
  table.scheme = scheme;
  table.k = scheme_order(scheme);
  table.os_range = os_range;
  table.n_bins = grid.size();
  table.n_rx = geom.n_receivers();
  table.n_samples = cfg.n_samples;
  table.hash = scene_hash(cfg, geom);

  const size_t entries = static_cast<size_t>(table.n_bins) *
                         static_cast<size_t>(table.n_rx) *
                         static_cast<size_t>(table.k);
  table.indices.assign(entries, 0);
  table.coeffs.assign(entries, cplx(0.0, 0.0));

  // validate the whole grid against the fast-time window first so the error
  // can name every offending bin
  std::string offenders;
  int offender_count = 0;
  for (int bin = 0; bin < table.n_bins; ++bin)
    for (int q = 0; q < table.n_rx; ++q) {
      const double r = sensed_range(cfg, geom, q, grid.point(bin));
      if (r >= 0.0 && r < static_cast<double>(cfg.n_samples)) continue;
      ++offender_count;
      if (offender_count <= 8) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s(bin %d, rx %d)",
                      offenders.empty() ? "" : ", ", bin, q);
        offenders += buf;
      }
    }
  if (offender_count > 0) {
    if (offender_count > 8) offenders += ", ...";
    throw std::runtime_error(
        "hop table: sensed range outside [0, n_samples) at " +
        std::to_string(offender_count) + " grid entries: " + offenders);
  }

  std::vector<double> residuals(static_cast<size_t>(table.n_bins), 0.0);
  parallel_for(table.n_bins, n_threads, [&](int bin) {
    const Vec2 x = grid.point(bin);
    double worst = 0.0;
    for (int q = 0; q < table.n_rx; ++q) {
      const double r = sensed_range(cfg, geom, q, x);
      const AtomFit fit = fit_atom(cfg.n_samples, os_range, r, scheme);
      const size_t at = table.entry_offset(bin, q);
      for (int j = 0; j < table.k; ++j) {
        table.indices[at + static_cast<size_t>(j)] =
            fit.indices[static_cast<size_t>(j)];
        table.coeffs[at + static_cast<size_t>(j)] =
            fit.coeffs[static_cast<size_t>(j)];
      }
      worst = std::max(worst, fit.residual);
    }
    residuals[static_cast<size_t>(bin)] = worst;
  });
  for (double w : residuals) table.max_residual = std::max(table.max_residual, w);
  return table;
}

namespace {

void put_u32(std::string& out, uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::string& out, uint64_t v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::string& out, double v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

struct ByteReader {
  const char* p;
  size_t left;
  const std::string& path;

  void need(size_t n, const char* what) const {
    if (left < n)
      throw std::runtime_error(path + ": truncated " + what + " (need " +
                               std::to_string(n) + " bytes, have " +
                               std::to_string(left) + ")");
  }
  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v;
    std::memcpy(&v, p, 4);
    p += 4;
    left -= 4;
    return v;
  }
  uint64_t u64(const char* what) {
    need(8, what);
    uint64_t v;
    std::memcpy(&v, p, 8);
    p += 8;
    left -= 8;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    double v;
    std::memcpy(&v, p, 8);
    p += 8;
    left -= 8;
    return v;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error(path + ": read failed");
  return data;
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw std::runtime_error(path + ": short write");
}

}  // namespace

void save_hop_table(const std::string& path, const HopTable& table) {
  std::string out;
  out.reserve(44 + table.indices.size() * 4 + table.coeffs.size() * 16);
  out.append("GHT1", 4);
  put_u32(out, kTableVersion);
  put_u32(out, static_cast<uint32_t>(table.n_rx));
  put_u32(out, static_cast<uint32_t>(table.n_bins));
  put_u32(out, static_cast<uint32_t>(table.k));
  put_u32(out, static_cast<uint32_t>(table.os_range));
  put_u32(out, static_cast<uint32_t>(table.n_samples));
  put_u64(out, table.hash);
  put_f64(out, table.max_residual);
  for (int bin = 0; bin < table.n_bins; ++bin)
    for (int q = 0; q < table.n_rx; ++q) {
      const size_t at = table.entry_offset(bin, q);
      for (int j = 0; j < table.k; ++j)
        put_u32(out, table.indices[at + static_cast<size_t>(j)]);
      for (int j = 0; j < table.k; ++j) {
        put_f64(out, table.coeffs[at + static_cast<size_t>(j)].real());
        put_f64(out, table.coeffs[at + static_cast<size_t>(j)].imag());
      }
    }
  write_file(path, out);
}

HopTable load_hop_table(const std::string& path, const WaveformConfig& cfg,
                        const SceneGeometry& geom, const LocationGrid& grid) {
  const std::string data = read_file(path);
  ByteReader rd{data.data(), data.size(), path};

  rd.need(4, "magic");
  if (std::memcmp(rd.p, "GHT1", 4) != 0)
    throw std::runtime_error(path + ": bad magic (not a GHT1 hop table)");
  rd.p += 4;
  rd.left -= 4;

  const uint32_t version = rd.u32("version");
  if (version != kTableVersion)
    throw std::runtime_error(path + ": unsupported hop table version " +
                             std::to_string(version));

  HopTable table;
  table.n_rx = static_cast<int>(rd.u32("receiver count"));
  table.n_bins = static_cast<int>(rd.u32("bin count"));
  table.k = static_cast<int>(rd.u32("order"));
  table.os_range = static_cast<int>(rd.u32("oversampling"));
  table.n_samples = static_cast<int>(rd.u32("sample count"));
  table.hash = rd.u64("scene hash");
  table.max_residual = rd.f64("worst residual");

  if (table.k < 1 || table.k > 3)
    throw std::runtime_error(path + ": unsupported interpolation order " +
                             std::to_string(table.k));
  table.scheme = static_cast<InterpScheme>(table.k);

  const size_t entries = static_cast<size_t>(table.n_bins) *
                         static_cast<size_t>(table.n_rx) *
                         static_cast<size_t>(table.k);
  const size_t payload = entries * (4 + 16);
  if (rd.left < payload)
    throw std::runtime_error(
        path + ": truncated (expected " + std::to_string(payload) +
        " payload bytes, have " + std::to_string(rd.left) + ")");
  if (rd.left > payload)
    throw std::runtime_error(
        path + ": payload size mismatch (expected " + std::to_string(payload) +
        " bytes, have " + std::to_string(rd.left) + ")");

  table.indices.resize(entries);
  table.coeffs.resize(entries);
  const uint32_t n_fft = static_cast<uint32_t>(table.n_samples) *
                         static_cast<uint32_t>(table.os_range);
  for (int bin = 0; bin < table.n_bins; ++bin)
    for (int q = 0; q < table.n_rx; ++q) {
      const size_t at = table.entry_offset(bin, q);
      for (int j = 0; j < table.k; ++j) {
        const uint32_t idx = rd.u32("index");
        if (idx >= n_fft)
          throw std::runtime_error(path + ": index " + std::to_string(idx) +
                                   " outside the FFT grid");
        table.indices[at + static_cast<size_t>(j)] = idx;
      }
      for (int j = 0; j < table.k; ++j) {
        const double re = rd.f64("coefficient");
        const double im = rd.f64("coefficient");
        table.coeffs[at + static_cast<size_t>(j)] = cplx(re, im);
      }
    }

  // bind to the scene and grid this table is about to serve
  if (table.hash != scene_hash(cfg, geom) ||
      table.n_rx != geom.n_receivers() || table.n_samples != cfg.n_samples ||
      table.n_bins != grid.size())
    throw std::runtime_error(path +
                             ": stale hop table (scene or grid mismatch)");
  return table;
}

}  // namespace gridhop
