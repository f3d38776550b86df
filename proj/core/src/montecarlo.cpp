#include "gridhop/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "gridhop/direct.hpp"
#include "gridhop/hopping.hpp"
#include "gridhop/indirect.hpp"
#include "gridhop/parallel.hpp"
#include "gridhop/rng.hpp"

namespace gridhop {
namespace {

// Substream tag for truth sampling; noise owns tags [0, Q).
constexpr uint64_t kSceneTag = 0x53434E;

int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class Fn>
std::pair<Estimate, int64_t> run_timed(bool timing, Fn&& fn) {
  if (!timing) return {fn(), 0};
  // median of three repetitions; the estimate itself is deterministic
  std::array<int64_t, 3> t{};
  Estimate est;
  for (int rep = 0; rep < 3; ++rep) {
    int64_t t0 = now_ns();
    Estimate e = fn();
    t[rep] = now_ns() - t0;
    if (rep == 0) est = e;
  }
  std::sort(t.begin(), t.end());
  return {est, t[1]};
}

}  // namespace

SampledScene sample_scene(const Scenario& sc, const LocationGrid& lgrid,
                          const VelocityGrid& vgrid, uint64_t trial) {
  if (sc.mode == SceneMode::ongrid) {
    OnGridScene scn = make_ongrid_scene(sc.cfg, sc.geom.n_receivers(), lgrid,
                                        vgrid, sc.seed, trial);
    return {scn.geom, scn.target};
  }
  Rng rng(substream(sc.seed, trial, kSceneTag));
  SampledScene s;
  s.geom = sc.geom;
  s.target.x[0] = sc.grid_origin[0] + rng.uniform(0.0, sc.grid_extent[0]);
  s.target.x[1] = sc.grid_origin[1] + rng.uniform(0.0, sc.grid_extent[1]);
  // keep the truth strictly inside the velocity grid's square cover
  double b = 0.95 * sc.speed_bound;
  s.target.v[0] = rng.uniform(-b, b);
  s.target.v[1] = rng.uniform(-b, b);
  s.target.alpha = std::polar(1.0, rng.uniform(0.0, 6.283185307179586));
  return s;
}

namespace {

Estimate run_algorithm(const Scenario& sc, Algorithm algo,
                       const SceneGeometry& geom, const FrameSet& frame,
                       const LocationGrid& lgrid, const VelocityGrid& vgrid,
                       const HopTable* table) {
  switch (algo) {
    case Algorithm::indirect:
      return indirect_estimate(sc.cfg, geom, frame, lgrid, vgrid, sc.os_range,
                               sc.os_doppler);
    case Algorithm::direct:
      return direct_estimate(sc.cfg, geom, frame, lgrid, vgrid);
    case Algorithm::hop:
      return hop_estimate(sc.cfg, geom, frame, *table, lgrid, vgrid,
                          sc.os_doppler);
  }
  throw std::logic_error("unhandled algorithm");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_snr(const std::optional<double>& snr) {
  return snr ? fmt_double(*snr) : std::string("none");
}

}  // namespace

std::vector<TrialRecord> run_monte_carlo(const Scenario& sc, int n_threads,
                                         const TableSource& tables) {
  sc.cfg.validate();
  sc.geom.validate();
  if (sc.trials < 1) throw std::invalid_argument("trials must be >= 1");

  const VelocityGrid vgrid = sc.velocity_grid();
  const size_t n_dens = sc.densities.size();
  const size_t n_snr = sc.snr_db.size();
  const size_t n_algo = sc.algorithms.size();
  const size_t n_trials = static_cast<size_t>(sc.trials);
  const bool want_hop =
      std::find(sc.algorithms.begin(), sc.algorithms.end(), Algorithm::hop) !=
      sc.algorithms.end();

  std::vector<TrialRecord> out(n_dens * n_snr * n_trials * n_algo);

  for (size_t d = 0; d < n_dens; ++d) {
    const double density = sc.densities[d];
    const LocationGrid lgrid = sc.location_grid(density);

    // Off-grid campaigns share one table per density; on-grid trials
    // re-place receivers, so each builds its own below.
    HopTable cell_table;
    int64_t cell_offline = 0;
    if (want_hop && sc.mode == SceneMode::offgrid) {
      if (tables) {
        auto got = tables(density, lgrid);
        cell_table = std::move(got.first);
        cell_offline = got.second;
      } else {
        int64_t t0 = now_ns();
        cell_table = precompute_hop_table(sc.cfg, sc.geom, lgrid, sc.scheme,
                                          sc.os_range, n_threads);
        cell_offline = now_ns() - t0;
      }
      if (!sc.timing) cell_offline = 0;
    }

    for (size_t s = 0; s < n_snr; ++s) {
      const std::optional<double> snr = sc.snr_db[s];
      parallel_for(n_trials, n_threads, [&](size_t t) {
        SampledScene scene = sample_scene(sc, lgrid, vgrid, t);
        FrameSet frame = synthesize_frame(sc.cfg, scene.geom, {scene.target});
        if (snr) add_noise(frame, NoiseSpec{snr, 1.0, sc.seed}, t);

        const HopTable* table = &cell_table;
        int64_t offline = cell_offline;
        HopTable own_table;
        if (want_hop && sc.mode == SceneMode::ongrid) {
          int64_t t0 = now_ns();
          own_table = precompute_hop_table(sc.cfg, scene.geom, lgrid,
                                           sc.scheme, sc.os_range);
          offline = sc.timing ? now_ns() - t0 : 0;
          table = &own_table;
        }

        for (size_t a = 0; a < n_algo; ++a) {
          Algorithm algo = sc.algorithms[a];
          auto [est, online] = run_timed(sc.timing, [&] {
            return run_algorithm(sc, algo, scene.geom, frame, lgrid, vgrid,
                                 table);
          });
          TrialRecord& rec =
              out[((d * n_snr + s) * n_trials + t) * n_algo + a];
          rec.trial = static_cast<int>(t);
          rec.snr_db = snr;
          rec.density = density;
          rec.algorithm = algo;
          rec.truth_x = scene.target.x;
          rec.truth_v = scene.target.v;
          rec.est_x = est.x;
          rec.est_v = est.v;
          rec.t_offline_ns = algo == Algorithm::hop ? offline : 0;
          rec.t_online_ns = online;
        }
      });
    }
  }
  return out;
}

double hit_ratio(const std::vector<TrialRecord>& records, Algorithm algorithm,
                 double threshold_m) {
  size_t total = 0, hits = 0;
  for (const auto& r : records) {
    if (r.algorithm != algorithm) continue;
    ++total;
    if ((r.est_x - r.truth_x).norm() <= threshold_m) ++hits;
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

double mean_online_ns(const std::vector<TrialRecord>& records,
                      Algorithm algorithm) {
  size_t total = 0;
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.algorithm != algorithm) continue;
    ++total;
    sum += static_cast<double>(r.t_online_ns);
  }
  return total ? sum / static_cast<double>(total) : 0.0;
}

double velocity_rmse_hits(const std::vector<TrialRecord>& records,
                          Algorithm algorithm, double threshold_m) {
  size_t hits = 0;
  double sum = 0.0;
  for (const auto& r : records) {
    if (r.algorithm != algorithm) continue;
    if ((r.est_x - r.truth_x).norm() > threshold_m) continue;
    ++hits;
    sum += (r.est_v - r.truth_v).squaredNorm();
  }
  return hits ? std::sqrt(sum / static_cast<double>(hits))
              : std::numeric_limits<double>::quiet_NaN();
}

std::vector<TrialRecord> filter_cell(
    const std::vector<TrialRecord>& records, std::optional<double> density,
    std::optional<std::optional<double>> snr_db) {
  std::vector<TrialRecord> kept;
  for (const auto& r : records) {
    if (density && r.density != *density) continue;
    if (snr_db && r.snr_db != *snr_db) continue;
    kept.push_back(r);
  }
  return kept;
}

void write_trial_csv(const std::string& path,
                     const std::vector<TrialRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "trial,snr_db,density,algorithm,"
         "truth_x0,truth_x1,truth_v0,truth_v1,"
         "est_x0,est_x1,est_v0,est_v1,t_offline_ns,t_online_ns\n";
  for (const auto& r : records) {
    out << r.trial << ',' << fmt_snr(r.snr_db) << ',' << fmt_double(r.density)
        << ',' << algorithm_name(r.algorithm) << ',' << fmt_double(r.truth_x[0])
        << ',' << fmt_double(r.truth_x[1]) << ',' << fmt_double(r.truth_v[0])
        << ',' << fmt_double(r.truth_v[1]) << ',' << fmt_double(r.est_x[0])
        << ',' << fmt_double(r.est_x[1]) << ',' << fmt_double(r.est_v[0])
        << ',' << fmt_double(r.est_v[1]) << ',' << r.t_offline_ns << ','
        << r.t_online_ns << '\n';
  }
  if (!out.flush()) throw std::runtime_error("short write: " + path);
}

void write_summary_csv(const std::string& path,
                       const std::vector<TrialRecord>& records,
                       const std::vector<double>& thresholds_m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "algorithm,density,snr_db,threshold_m,hit_ratio,mean_online_ns\n";

  // cells in first-seen record order
  std::vector<double> densities;
  std::vector<std::optional<double>> snrs;
  std::vector<Algorithm> algos;
  for (const auto& r : records) {
    if (std::find(densities.begin(), densities.end(), r.density) ==
        densities.end())
      densities.push_back(r.density);
    if (std::find(snrs.begin(), snrs.end(), r.snr_db) == snrs.end())
      snrs.push_back(r.snr_db);
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end())
      algos.push_back(r.algorithm);
  }

  for (double density : densities)
    for (const auto& snr : snrs) {
      auto cell = filter_cell(records, density, std::optional(snr));
      if (cell.empty()) continue;
      for (Algorithm algo : algos) {
        double mean_ns = mean_online_ns(cell, algo);
        for (double th : thresholds_m)
          out << algorithm_name(algo) << ',' << fmt_double(density) << ','
              << fmt_snr(snr) << ',' << fmt_double(th) << ','
              << fmt_double(hit_ratio(cell, algo, th)) << ','
              << fmt_double(mean_ns) << '\n';
      }
    }
  if (!out.flush()) throw std::runtime_error("short write: " + path);
}

}  // namespace gridhop
