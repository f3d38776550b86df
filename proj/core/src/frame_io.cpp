#include "gridhop/frame_io.hpp"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gridhop {

namespace {

constexpr uint32_t kFrameVersion = 1;

void append_u32(std::string& out, uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}
void append_f64(std::string& out, double v) {
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
  double f64(const char* what) {
    need(8, what);
    double v;
    std::memcpy(&v, p, 8);
    p += 8;
    left -= 8;
    return v;
  }
};

}  // namespace

void write_frames(const std::string& path, const WaveformConfig& cfg,
                  const SceneGeometry& geom,
                  const std::vector<FrameSet>& frames) {
  cfg.validate();
  geom.validate();
  const size_t q_count = static_cast<size_t>(geom.n_receivers());
  for (const FrameSet& frame : frames) {
    if (frame.size() != q_count)
      throw std::invalid_argument(path + ": frame/receiver count mismatch");
    for (const CMat& y : frame)
      if (y.rows() != cfg.n_chirps || y.cols() != cfg.n_samples)
        throw std::invalid_argument(path + ": frame shape mismatch");
  }

  std::string out;
  const size_t per_frame =
      q_count * static_cast<size_t>(cfg.n_chirps) *
      static_cast<size_t>(cfg.n_samples) * 16;
  out.reserve(24 + 24 + (q_count + 1) * 16 + frames.size() * per_frame);

  out.append("MRF1", 4);
  append_u32(out, kFrameVersion);
  append_u32(out, static_cast<uint32_t>(q_count));
  append_u32(out, static_cast<uint32_t>(cfg.n_chirps));
  append_u32(out, static_cast<uint32_t>(cfg.n_samples));
  append_u32(out, static_cast<uint32_t>(frames.size()));
  append_f64(out, cfg.f0);
  append_f64(out, cfg.bandwidth);
  append_f64(out, cfg.chirp_duration);
  append_f64(out, geom.tx.x());
  append_f64(out, geom.tx.y());
  for (const Vec2& p : geom.rx) {
    append_f64(out, p.x());
    append_f64(out, p.y());
  }
  for (const FrameSet& frame : frames)
    for (const CMat& y : frame)
      for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
          append_f64(out, y(i, j).real());
          append_f64(out, y(i, j).imag());
        }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.flush();
  if (!f) throw std::runtime_error(path + ": short write");
}

Capture read_frames(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open");
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  if (f.bad()) throw std::runtime_error(path + ": read failed");

  ByteReader rd{data.data(), data.size(), path};
  rd.need(4, "magic");
  if (std::memcmp(rd.p, "MRF1", 4) != 0)
    throw std::runtime_error(path + ": bad magic (not an MRF1 capture)");
  rd.p += 4;
  rd.left -= 4;

  const uint32_t version = rd.u32("version");
  if (version != kFrameVersion)
    throw std::runtime_error(path + ": unsupported capture version " +
                             std::to_string(version));

  Capture cap;
  const uint32_t q_count = rd.u32("receiver count");
  cap.cfg.n_chirps = static_cast<int>(rd.u32("chirp count"));
  cap.cfg.n_samples = static_cast<int>(rd.u32("sample count"));
  const uint32_t n_frames = rd.u32("frame count");
  cap.cfg.f0 = rd.f64("carrier");
  cap.cfg.bandwidth = rd.f64("bandwidth");
  cap.cfg.chirp_duration = rd.f64("chirp duration");
  cap.geom.tx.x() = rd.f64("TX coordinate");
  cap.geom.tx.y() = rd.f64("TX coordinate");
  cap.geom.rx.resize(q_count);
  for (uint32_t q = 0; q < q_count; ++q) {
    cap.geom.rx[q].x() = rd.f64("RX coordinate");
    cap.geom.rx[q].y() = rd.f64("RX coordinate");
  }
  cap.cfg.validate();
  cap.geom.validate();

  const size_t payload = static_cast<size_t>(n_frames) * q_count *
                         static_cast<size_t>(cap.cfg.n_chirps) *
                         static_cast<size_t>(cap.cfg.n_samples) * 16;
  if (rd.left != payload)
    throw std::runtime_error(
        path + ": payload size mismatch (expected " + std::to_string(payload) +
        " bytes, have " + std::to_string(rd.left) + ")");

  cap.frames.resize(n_frames);
  for (uint32_t fidx = 0; fidx < n_frames; ++fidx) {
    FrameSet& frame = cap.frames[fidx];
    frame.resize(q_count);
    for (uint32_t q = 0; q < q_count; ++q) {
      CMat& y = frame[q];
      y.resize(cap.cfg.n_chirps, cap.cfg.n_samples);
      for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
          const double re = rd.f64("sample");
          const double im = rd.f64("sample");
          y(i, j) = cplx(re, im);
        }
    }
  }
  return cap;
}

std::vector<TruthSample> read_truth_track(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error(path + ": cannot open");
  std::vector<TruthSample> track;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = true;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch))) {
        blank = false;
        break;
      }
    if (blank) continue;

    TruthSample s;
    double fields[5];
    char extra;
    const int got = std::sscanf(line.c_str(), " %lf , %lf , %lf , %lf , %lf %c",
                                 &fields[0], &fields[1], &fields[2], &fields[3],
                                 &fields[4], &extra);
    if (got != 5)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 't,x0,x1,v0,v1'");
    s.t = fields[0];
    s.x = Vec2(fields[1], fields[2]);
    s.v = Vec2(fields[3], fields[4]);
    if (!track.empty() && s.t <= track.back().t)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": time not strictly increasing");
    track.push_back(s);
  }
  return track;
}

void write_truth_track(const std::string& path,
                       const std::vector<TruthSample>& track) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f << "# t,x0,x1,v0,v1\n";
  char buf[160];
  for (const TruthSample& s : track) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                  s.x.x(), s.x.y(), s.v.x(), s.v.y());
    f << buf;
  }
  f.flush();
  if (!f) throw std::runtime_error(path + ": short write");
}

}  // namespace gridhop
