#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridhop/direct.hpp"
#include "gridhop/frame_io.hpp"
#include "gridhop/hopping.hpp"
#include "gridhop/indirect.hpp"
#include "gridhop/montecarlo.hpp"

using namespace gridhop;

namespace {

int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double ms(int64_t ns) { return static_cast<double>(ns) * 1e-6; }

struct SimulateOpts {
  std::string scenario, out, truth;
  uint64_t trial = 0;
};

int run_simulate(const SimulateOpts& o) {
  Scenario sc = load_scenario(o.scenario);
  LocationGrid lgrid = sc.location_grid(sc.densities.front());
  VelocityGrid vgrid = sc.velocity_grid();
  SampledScene scene = sample_scene(sc, lgrid, vgrid, o.trial);

  // back-to-back frames, constant velocity between them
  double frame_period = sc.cfg.n_chirps * sc.cfg.chirp_duration;
  std::vector<FrameSet> frames;
  std::vector<TruthSample> track;
  for (int k = 0; k < sc.frames; ++k) {
    double t = k * frame_period;
    Target at = scene.target;
    at.x = scene.target.x + t * scene.target.v;
    FrameSet f = synthesize_frame(sc.cfg, scene.geom, {at});
    if (sc.snr_db.front())
      add_noise(f, NoiseSpec{sc.snr_db.front(), 1.0, sc.seed},
                o.trial * static_cast<uint64_t>(sc.frames) + k);
    frames.push_back(std::move(f));
    track.push_back({t, at.x, at.v});
  }

  write_frames(o.out, sc.cfg, scene.geom, frames);
  std::fprintf(stderr, "wrote %zu frame(s) to %s\n", frames.size(),
               o.out.c_str());
  if (!o.truth.empty()) {
    write_truth_track(o.truth, track);
    std::fprintf(stderr, "wrote truth track to %s\n", o.truth.c_str());
  }
  return 0;
}

struct EstimateOpts {
  std::string frames, scenario, algo = "direct", table, out;
  double density = 0.0;  // 0: first scenario density
  int oversample = 0;    // 0: scenario value
  int threads = 1;
};

int run_estimate(const EstimateOpts& o) {
  Scenario sc = load_scenario(o.scenario);
  Capture cap = read_frames(o.frames);
  Algorithm algo = algorithm_from_name(o.algo);
  double density = o.density > 0.0 ? o.density : sc.densities.front();
  int os_range = o.oversample > 0 ? o.oversample : sc.os_range;

  // the capture is authoritative for waveform and stations; the scenario
  // only contributes the search grids
  LocationGrid lgrid =
      LocationGrid::build(cap.cfg, sc.grid_origin, sc.grid_extent, density);
  VelocityGrid vgrid =
      VelocityGrid::build(cap.cfg, sc.speed_bound, sc.velocity_density);

  HopTable table;
  if (algo == Algorithm::hop) {
    if (!o.table.empty()) {
      table = load_hop_table(o.table, cap.cfg, cap.geom, lgrid);
    } else {
      std::fprintf(stderr, "no --table given, building hop table\n");
      int64_t t0 = now_ns();
      table = precompute_hop_table(cap.cfg, cap.geom, lgrid, sc.scheme,
                                   os_range, o.threads);
      std::fprintf(stderr, "built hop table in %.1f ms\n", ms(now_ns() - t0));
    }
  }

  std::FILE* out = stdout;
  if (!o.out.empty()) {
    out = std::fopen(o.out.c_str(), "wb");
    if (!out) throw std::runtime_error("cannot write " + o.out);
  }
  std::fprintf(out, "frame,algorithm,x0,x1,v0,v1,stage1_ns,stage2_ns\n");
  for (size_t k = 0; k < cap.frames.size(); ++k) {
    Estimate e;
    switch (algo) {
      case Algorithm::indirect:
        e = indirect_estimate(cap.cfg, cap.geom, cap.frames[k], lgrid, vgrid,
                              os_range, sc.os_doppler);
        break;
      case Algorithm::direct:
        e = direct_estimate(cap.cfg, cap.geom, cap.frames[k], lgrid, vgrid,
                            o.threads);
        break;
      case Algorithm::hop:
        e = hop_estimate(cap.cfg, cap.geom, cap.frames[k], table, lgrid, vgrid,
                         sc.os_doppler, o.threads);
        break;
    }
    std::fprintf(out, "%zu,%s,%.17g,%.17g,%.17g,%.17g,%lld,%lld\n", k,
                 std::string(algorithm_name(algo)).c_str(), e.x[0], e.x[1],
                 e.v[0], e.v[1], static_cast<long long>(e.times.stage1_ns),
                 static_cast<long long>(e.times.stage2_ns));
  }
  if (out != stdout) std::fclose(out);
  return 0;
}

struct HoptableOpts {
  std::string scenario, out, scheme;
  double density = 0.0;
  int oversample = 0;
  int threads = 1;
};

int run_hoptable(const HoptableOpts& o) {
  Scenario sc = load_scenario(o.scenario);
  double density = o.density > 0.0 ? o.density : sc.densities.front();
  InterpScheme scheme =
      o.scheme.empty() ? sc.scheme : scheme_from_name(o.scheme);
  int os_range = o.oversample > 0 ? o.oversample : sc.os_range;
  LocationGrid lgrid = sc.location_grid(density);

  int64_t t0 = now_ns();
  HopTable table =
      precompute_hop_table(sc.cfg, sc.geom, lgrid, scheme, os_range, o.threads);
  int64_t built = now_ns() - t0;
  save_hop_table(o.out, table);
  std::fprintf(stderr,
               "hop table: %d bins x %d rx, k=%d, os=%d, max residual %.3g, "
               "built in %.1f ms -> %s\n",
               table.n_bins, table.n_rx, table.k, table.os_range,
               table.max_residual, ms(built), o.out.c_str());
  return 0;
}

struct BenchOpts {
  std::string scenario, out_dir = ".", tables_dir;
  int threads = 1;
  int trials = 0;        // 0: scenario value
  uint64_t seed = 0;     // 0: scenario value
  bool no_timing = false;
};

int run_bench(const BenchOpts& o) {
  Scenario sc = load_scenario(o.scenario);
  if (o.trials > 0) sc.trials = o.trials;
  if (o.seed) sc.seed = o.seed;
  if (o.no_timing) sc.timing = false;
  std::filesystem::create_directories(o.out_dir);
  std::string tables_dir = o.tables_dir.empty() ? o.out_dir : o.tables_dir;
  std::filesystem::create_directories(tables_dir);

  TableSource source;
  if (sc.mode == SceneMode::offgrid) {
    source = [&sc, &tables_dir](double density, const LocationGrid& grid)
        -> std::pair<HopTable, int64_t> {
      char name[80];
      std::snprintf(name, sizeof name, "hop_d%g_P%d_%s.ght", density,
                    sc.os_range, std::string(scheme_name(sc.scheme)).c_str());
      std::string path = tables_dir + "/" + name;
      if (std::filesystem::exists(path)) {
        try {
          int64_t t0 = now_ns();
          HopTable t = load_hop_table(path, sc.cfg, sc.geom, grid);
          int64_t took = now_ns() - t0;
          std::fprintf(stderr, "reusing hop table %s\n", path.c_str());
          return {std::move(t), took};
        } catch (const std::exception& e) {
          std::fprintf(stderr, "cannot reuse %s (%s), rebuilding\n",
                       path.c_str(), e.what());
        }
      }
      int64_t t0 = now_ns();
      HopTable t = precompute_hop_table(sc.cfg, sc.geom, grid, sc.scheme,
                                        sc.os_range);
      int64_t took = now_ns() - t0;
      save_hop_table(path, t);
      std::fprintf(stderr, "built hop table %s (%.1f ms, max residual %.3g)\n",
                   path.c_str(), ms(took), t.max_residual);
      return {std::move(t), took};
    };
  }

  int64_t t0 = now_ns();
  std::vector<TrialRecord> records = run_monte_carlo(sc, o.threads, source);
  std::fprintf(stderr, "%zu records in %.1f ms\n", records.size(),
               ms(now_ns() - t0));

  std::string trials_csv = o.out_dir + "/trials.csv";
  std::string summary_csv = o.out_dir + "/summary.csv";
  write_trial_csv(trials_csv, records);
  write_summary_csv(summary_csv, records, sc.thresholds_m);
  std::fprintf(stderr, "wrote %s and %s\n", trials_csv.c_str(),
               summary_csv.c_str());

  double th = sc.thresholds_m.back();
  for (Algorithm a : sc.algorithms)
    std::fprintf(stderr,
                 "%-8s hit ratio %.3f at %.2f m, velocity rmse (hits) %.3g "
                 "m/s, mean online %.3f ms\n",
                 std::string(algorithm_name(a)).c_str(), hit_ratio(records, a, th),
                 th, velocity_rmse_hits(records, a, th),
                 mean_online_ns(records, a) * 1e-6);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multistatic FMCW location/velocity estimation workbench"};
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* s = app.add_subcommand("simulate", "synthesize frames for one trial");
  s->add_option("--scenario", sim.scenario, "scenario file")
      ->required()->check(CLI::ExistingFile);
  s->add_option("--out", sim.out, "output frames file")->required();
  s->add_option("--truth", sim.truth, "also write the ground-truth track");
  s->add_option("--trial", sim.trial, "trial index (default 0)");

  EstimateOpts est;
  auto* e = app.add_subcommand("estimate", "run one pipeline on a capture");
  e->add_option("--frames", est.frames, "capture file")
      ->required()->check(CLI::ExistingFile);
  e->add_option("--scenario", est.scenario, "scenario file (grids)")
      ->required()->check(CLI::ExistingFile);
  e->add_option("--algo", est.algo, "indirect|direct|hop (default direct)");
  e->add_option("--table", est.table, "hop table file")->check(CLI::ExistingFile);
  e->add_option("--density", est.density, "grid density override");
  e->add_option("--oversample", est.oversample, "range oversampling override");
  e->add_option("--threads", est.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  e->add_option("--out", est.out, "write the CSV here instead of stdout");

  HoptableOpts hop;
  auto* h = app.add_subcommand("hoptable", "precompute and save a hop table");
  h->add_option("--scenario", hop.scenario, "scenario file")
      ->required()->check(CLI::ExistingFile);
  h->add_option("--out", hop.out, "output table file")->required();
  h->add_option("--density", hop.density, "grid density override");
  h->add_option("--scheme", hop.scheme, "nearest|linear|poly3 override");
  h->add_option("--oversample", hop.oversample, "range oversampling override");
  h->add_option("--threads", hop.threads, "worker threads")
      ->check(CLI::PositiveNumber);

  BenchOpts ben;
  auto* b = app.add_subcommand("bench", "run the Monte Carlo comparison");
  b->add_option("--scenario", ben.scenario, "scenario file")
      ->required()->check(CLI::ExistingFile);
  b->add_option("--out-dir", ben.out_dir, "output directory (default .)");
  b->add_option("--tables", ben.tables_dir,
                "hop table cache directory (default out-dir)");
  b->add_option("--threads", ben.threads, "trial-level worker threads")
      ->check(CLI::PositiveNumber);
  b->add_option("--trials", ben.trials, "trial count override");
  b->add_option("--seed", ben.seed, "seed override");
  b->add_flag("--no-timing", ben.no_timing,
              "zero the timing columns, single repetition");

  try {
    app.parse(argc, argv);
    if (*s) return run_simulate(sim);
    if (*e) return run_estimate(est);
    if (*h) return run_hoptable(hop);
    if (*b) return run_bench(ben);
    return 2;
  } catch (const CLI::ParseError& err) {
    int rc = app.exit(err);
    return rc == 0 ? 0 : 2;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::domain_error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
}
