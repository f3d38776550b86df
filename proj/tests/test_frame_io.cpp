#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "gridhop/frame_io.hpp"
#include "gridhop/rng.hpp"

using namespace gridhop;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("gridhop_io_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

WaveformConfig small_cfg() {
  WaveformConfig cfg;
  cfg.f0 = 77.0e9;
  cfg.bandwidth = 300.0e6;
  cfg.chirp_duration = 5.0e-5;
  cfg.n_chirps = 8;
  cfg.n_samples = 12;
  return cfg;
}

SceneGeometry small_geom() {
  SceneGeometry g;
  g.tx = {0.25, -0.5};
  g.rx = {{-14.0, 8.0}, {16.0, 5.0}};
  return g;
}

std::vector<FrameSet> random_capture(const WaveformConfig& cfg, int q_count,
                                     int n_frames, uint64_t stream) {
  Rng rng(stream);
  std::vector<FrameSet> frames(static_cast<size_t>(n_frames));
  for (FrameSet& frame : frames) {
    frame.resize(static_cast<size_t>(q_count));
    for (CMat& y : frame) {
      y.resize(cfg.n_chirps, cfg.n_samples);
      for (int i = 0; i < cfg.n_chirps; ++i)
        for (int j = 0; j < cfg.n_samples; ++j)
          y(i, j) = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    }
  }
  return frames;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("capture files round-trip bit for bit") {
  TempDir tmp;
  const WaveformConfig cfg = small_cfg();
  const SceneGeometry geom = small_geom();
  const auto frames = random_capture(cfg, 2, 3, 101);

  const std::string path = tmp.file("cap.mrf");
  write_frames(path, cfg, geom, frames);

  const Capture cap = read_frames(path);
  CHECK(cap.cfg.f0 == cfg.f0);
  CHECK(cap.cfg.bandwidth == cfg.bandwidth);
  CHECK(cap.cfg.chirp_duration == cfg.chirp_duration);
  CHECK(cap.cfg.n_chirps == cfg.n_chirps);
  CHECK(cap.cfg.n_samples == cfg.n_samples);
  CHECK(cap.cfg.c == kSpeedOfLight);  // not stored; reader default
  CHECK((cap.geom.tx - geom.tx).norm() == 0.0);
  REQUIRE(cap.geom.rx.size() == 2);
  CHECK((cap.geom.rx[0] - geom.rx[0]).norm() == 0.0);
  CHECK((cap.geom.rx[1] - geom.rx[1]).norm() == 0.0);
  REQUIRE(cap.frames.size() == 3);
  for (size_t k = 0; k < 3; ++k)
    for (size_t q = 0; q < 2; ++q)
      CHECK(cap.frames[k][q] == frames[k][q]);
}

TEST_CASE("an empty capture (zero frames) is legal") {
  TempDir tmp;
  const std::string path = tmp.file("empty.mrf");
  write_frames(path, small_cfg(), small_geom(), {});
  const Capture cap = read_frames(path);
  CHECK(cap.frames.empty());
  CHECK(cap.cfg.n_chirps == 8);
}

TEST_CASE("capture writer validates frame shapes") {
  TempDir tmp;
  const WaveformConfig cfg = small_cfg();
  const SceneGeometry geom = small_geom();
  auto frames = random_capture(cfg, 2, 1, 102);
  frames[0].pop_back();
  CHECK_THROWS_AS(write_frames(tmp.file("x.mrf"), cfg, geom, frames),
                  std::invalid_argument);

  frames = random_capture(cfg, 2, 1, 103);
  frames[0][1].resize(cfg.n_chirps + 1, cfg.n_samples);
  CHECK_THROWS_AS(write_frames(tmp.file("x.mrf"), cfg, geom, frames),
                  std::invalid_argument);
}

TEST_CASE("capture reader names what is wrong with a bad file") {
  TempDir tmp;
  const WaveformConfig cfg = small_cfg();
  const SceneGeometry geom = small_geom();
  const std::string good = tmp.file("good.mrf");
  write_frames(good, cfg, geom, random_capture(cfg, 2, 2, 104));
  const std::string bytes = slurp(good);

  auto expect = [&](const std::string& name, const std::string& mutated,
                    const char* needle) {
    const std::string path = tmp.file(name.c_str());
    spit(path, mutated);
    try {
      static_cast<void>(read_frames(path));
      FAIL_CHECK("expected failure: " << needle);
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect("magic.mrf", "XXXX" + bytes.substr(4), "bad magic");
  std::string v2 = bytes;
  v2[4] = 9;  // version
  expect("version.mrf", v2, "unsupported capture version");
  expect("trunc.mrf", bytes.substr(0, 30), "truncated");
  expect("short.mrf", bytes.substr(0, bytes.size() - 16), "payload size mismatch");
  expect("long.mrf", bytes + std::string(8, '\0'), "payload size mismatch");

  CHECK_THROWS_WITH_AS(static_cast<void>(read_frames(tmp.file("nope.mrf"))),
                       doctest::Contains("cannot open"), std::runtime_error);
}

TEST_CASE("truth tracks round-trip through text") {
  TempDir tmp;
  std::vector<TruthSample> track(3);
  track[0] = {0.0, {1.25, -2.5}, {3.0, 4.0}};
  track[1] = {0.0128, {1.2884, -2.4488}, {3.0, 4.0}};
  track[2] = {0.0256, {1.3268, -2.3976}, {3.0, 4.0}};

  const std::string path = tmp.file("truth.csv");
  write_truth_track(path, track);
  const auto back = read_truth_track(path);
  REQUIRE(back.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(back[i].t == track[i].t);
    CHECK((back[i].x - track[i].x).norm() == 0.0);
    CHECK((back[i].v - track[i].v).norm() == 0.0);
  }
}

TEST_CASE("truth track parser flags bad lines by number") {
  TempDir tmp;
  const std::string path = tmp.file("truth.csv");
  {
    std::ofstream f(path);
    f << "# comment\n\n0.0,1,2,3,4\n0.5,5,6,7,8\n";
  }
  CHECK(read_truth_track(path).size() == 2);

  {
    std::ofstream f(path);
    f << "0.0,1,2,3,4\n0.5,5,6\n";
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(read_truth_track(path)),
                       doctest::Contains(":2: expected"), std::runtime_error);

  {
    std::ofstream f(path);
    f << "0.0,1,2,3,4\n# fine\n0.0,5,6,7,8\n";
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(read_truth_track(path)),
                       doctest::Contains(":3: time not strictly increasing"),
                       std::runtime_error);
}
