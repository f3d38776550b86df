#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridhop/montecarlo.hpp"

using namespace gridhop;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("gridhop_mc_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

Scenario tiny_scenario() {
  Scenario sc;
  sc.cfg.f0 = 24.0e9;
  sc.cfg.bandwidth = 250.0e6;
  sc.cfg.chirp_duration = 1.0e-4;
  sc.cfg.n_chirps = 32;
  sc.cfg.n_samples = 64;
  sc.geom.tx = {0.0, 0.0};
  sc.geom.rx = {{-10.0, 6.0}, {12.0, 4.0}, {1.0, -9.0}};
  sc.grid_origin = {-4.0, -3.0};
  sc.grid_extent = {8.0, 6.0};
  sc.speed_bound = 10.0;
  sc.snr_db = {std::optional<double>(10.0), std::nullopt};
  sc.densities = {1.0, 2.0};
  sc.thresholds_m = {0.5, 1.0, 2.0};
  sc.trials = 3;
  sc.seed = 77;
  sc.timing = false;
  return sc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("records come out in (density, snr, trial, algorithm) order") {
  const Scenario sc = tiny_scenario();
  const auto records = run_monte_carlo(sc);
  REQUIRE(records.size() == 2u * 2u * 3u * 3u);

  size_t i = 0;
  for (double density : {1.0, 2.0})
    for (int s = 0; s < 2; ++s)
      for (int trial = 0; trial < 3; ++trial)
        for (auto algo : {Algorithm::indirect, Algorithm::direct, Algorithm::hop}) {
          const TrialRecord& r = records[i++];
          CHECK(r.density == density);
          CHECK(r.snr_db == sc.snr_db[static_cast<size_t>(s)]);
          CHECK(r.trial == trial);
          CHECK(r.algorithm == algo);
          // timing off: all clocks read zero
          CHECK(r.t_online_ns == 0);
          CHECK(r.t_offline_ns == 0);
        }
}

TEST_CASE("every cell sees the same truths, keyed by trial alone") {
  const Scenario sc = tiny_scenario();
  const auto records = run_monte_carlo(sc);

  const auto d1 = filter_cell(records, 1.0, {});
  const auto d2 = filter_cell(records, 2.0, {});
  REQUIRE(d1.size() == d2.size());
  for (size_t i = 0; i < d1.size(); ++i) {
    CHECK((d1[i].truth_x - d2[i].truth_x).norm() == 0.0);
    CHECK((d1[i].truth_v - d2[i].truth_v).norm() == 0.0);
  }

  const auto noisy = filter_cell(records, {}, std::optional<double>(10.0));
  const auto clean = filter_cell(records, {}, std::optional<std::optional<double>>(
                                                  std::optional<double>{}));
  REQUIRE(!noisy.empty());
  REQUIRE(noisy.size() == clean.size());
  for (size_t i = 0; i < noisy.size(); ++i)
    CHECK((noisy[i].truth_x - clean[i].truth_x).norm() == 0.0);

  // truths match the published sampler
  const LocationGrid lgrid = sc.location_grid(1.0);
  const VelocityGrid vgrid = sc.velocity_grid();
  for (const TrialRecord& r : d1) {
    const SampledScene scene =
        sample_scene(sc, lgrid, vgrid, static_cast<uint64_t>(r.trial));
    CHECK((scene.target.x - r.truth_x).norm() == 0.0);
    CHECK((scene.target.v - r.truth_v).norm() == 0.0);
  }
}

TEST_CASE("off-grid truths stay inside the configured box") {
  const Scenario sc = tiny_scenario();
  const LocationGrid lgrid = sc.location_grid(1.0);
  const VelocityGrid vgrid = sc.velocity_grid();
  for (uint64_t trial = 0; trial < 50; ++trial) {
    const SampledScene s = sample_scene(sc, lgrid, vgrid, trial);
    CHECK(s.target.x.x() >= sc.grid_origin.x());
    CHECK(s.target.x.x() <= sc.grid_origin.x() + sc.grid_extent.x());
    CHECK(s.target.x.y() >= sc.grid_origin.y());
    CHECK(s.target.x.y() <= sc.grid_origin.y() + sc.grid_extent.y());
    CHECK(std::abs(s.target.v.x()) <= 0.95 * sc.speed_bound);
    CHECK(std::abs(s.target.v.y()) <= 0.95 * sc.speed_bound);
    CHECK(std::abs(std::abs(s.target.alpha) - 1.0) < 1e-12);
    // off-grid scenes keep the scenario stations
    CHECK((s.geom.tx - sc.geom.tx).norm() == 0.0);
  }
}

TEST_CASE("runs are reproducible and independent of the worker count") {
  const Scenario sc = tiny_scenario();
  const auto a = run_monte_carlo(sc, 1);
  const auto b = run_monte_carlo(sc, 4);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].trial == b[i].trial);
    CHECK(a[i].algorithm == b[i].algorithm);
    CHECK((a[i].est_x - b[i].est_x).norm() == 0.0);
    CHECK((a[i].est_v - b[i].est_v).norm() == 0.0);
  }

  TempDir tmp;
  write_trial_csv(tmp.file("a.csv"), a);
  write_trial_csv(tmp.file("b.csv"), b);
  CHECK(slurp(tmp.file("a.csv")) == slurp(tmp.file("b.csv")));
}

TEST_CASE("timing on fills online clocks; table source feeds offline ones") {
  Scenario sc = tiny_scenario();
  sc.timing = true;
  sc.trials = 1;
  sc.snr_db = {std::optional<double>(10.0)};
  sc.densities = {1.0};

  int calls = 0;
  const TableSource source = [&](double density, const LocationGrid& grid) {
    ++calls;
    CHECK(density == 1.0);
    return std::make_pair(
        precompute_hop_table(sc.cfg, sc.geom, grid, sc.scheme, sc.os_range),
        int64_t{12345});
  };
  const auto records = run_monte_carlo(sc, 1, source);
  CHECK(calls == 1);
  for (const TrialRecord& r : records) {
    CHECK(r.t_online_ns > 0);
    if (r.algorithm == Algorithm::hop)
      CHECK(r.t_offline_ns == 12345);
    else
      CHECK(r.t_offline_ns == 0);
  }
}

TEST_CASE("ongrid campaigns recover every scene exactly") {
  Scenario sc = tiny_scenario();
  sc.cfg.n_chirps = 64;
  sc.mode = SceneMode::ongrid;
  sc.snr_db = {std::nullopt};
  sc.densities = {1.0};
  sc.trials = 4;
  sc.speed_bound = 12.0;

  const auto records = run_monte_carlo(sc, 2);
  REQUIRE(records.size() == 4u * 3u);
  for (const TrialRecord& r : records) {
    CHECK((r.est_x - r.truth_x).norm() == 0.0);
    CHECK((r.est_v - r.truth_v).norm() == 0.0);
  }
}

TEST_CASE("summary statistics reduce handcrafted records correctly") {
  std::vector<TrialRecord> records(4);
  for (int i = 0; i < 4; ++i) {
    records[i].algorithm = i < 3 ? Algorithm::direct : Algorithm::indirect;
    records[i].truth_x = {0.0, 0.0};
    records[i].truth_v = {1.0, 0.0};
    records[i].t_online_ns = 100 * (i + 1);
  }
  records[0].est_x = {0.1, 0.0};  // error 0.1
  records[0].est_v = {1.0, 0.5};
  records[1].est_x = {0.0, 0.9};  // error 0.9
  records[1].est_v = {1.0, 0.0};
  records[2].est_x = {5.0, 0.0};  // miss at any threshold below 5
  records[3].est_x = {0.0, 0.0};  // the indirect record

  CHECK(hit_ratio(records, Algorithm::direct, 0.5) == doctest::Approx(1.0 / 3.0));
  CHECK(hit_ratio(records, Algorithm::direct, 1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(hit_ratio(records, Algorithm::direct, 10.0) == doctest::Approx(1.0));
  CHECK(hit_ratio(records, Algorithm::indirect, 0.5) == doctest::Approx(1.0));
  CHECK(hit_ratio(records, Algorithm::hop, 1.0) == 0.0);  // no such records

  CHECK(mean_online_ns(records, Algorithm::direct) == doctest::Approx(200.0));
  CHECK(mean_online_ns(records, Algorithm::indirect) == doctest::Approx(400.0));

  // at 0.5 m only record 0 hits: velocity error is 0.5
  CHECK(velocity_rmse_hits(records, Algorithm::direct, 0.5) ==
        doctest::Approx(0.5));
  // at 1.0 m records 0 and 1 hit: rms of {0.5, 0}
  CHECK(velocity_rmse_hits(records, Algorithm::direct, 1.0) ==
        doctest::Approx(std::sqrt(0.125)));
  CHECK(std::isnan(velocity_rmse_hits(records, Algorithm::hop, 1.0)));
}

TEST_CASE("trial CSV format is stable") {
  std::vector<TrialRecord> records(2);
  records[0].trial = 0;
  records[0].snr_db = 5.0;
  records[0].density = 2.0;
  records[0].algorithm = Algorithm::direct;
  records[0].truth_x = {1.5, -2.25};
  records[0].truth_v = {3.0, 4.0};
  records[0].est_x = {1.5, -2.0};
  records[0].est_v = {3.0, 4.0};
  records[0].t_online_ns = 1234;
  records[1].trial = 1;
  records[1].algorithm = Algorithm::hop;
  records[1].density = 1.0;
  records[1].t_offline_ns = 99;

  TempDir tmp;
  write_trial_csv(tmp.file("t.csv"), records);
  std::istringstream in(slurp(tmp.file("t.csv")));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line ==
        "trial,snr_db,density,algorithm,truth_x0,truth_x1,truth_v0,truth_v1,"
        "est_x0,est_x1,est_v0,est_v1,t_offline_ns,t_online_ns");
  REQUIRE(std::getline(in, line));
  CHECK(line == "0,5,2,direct,1.5,-2.25,3,4,1.5,-2,3,4,0,1234");
  REQUIRE(std::getline(in, line));
  CHECK(line == "1,none,1,hop,0,0,0,0,0,0,0,0,99,0");
  CHECK(!std::getline(in, line));
}

TEST_CASE("summary CSV walks cells in first-seen order with one row per threshold") {
  const Scenario sc = tiny_scenario();
  const auto records = run_monte_carlo(sc);
  TempDir tmp;
  write_summary_csv(tmp.file("s.csv"), records, sc.thresholds_m);

  std::istringstream in(slurp(tmp.file("s.csv")));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line ==
        "algorithm,density,snr_db,threshold_m,hit_ratio,mean_online_ns");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  // 3 algorithms x 2 densities x 2 snrs x 3 thresholds
  CHECK(rows == 36);
}
