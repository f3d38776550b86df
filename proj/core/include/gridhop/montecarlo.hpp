#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridhop/scenario.hpp"
#include "gridhop/synth.hpp"

namespace gridhop {

// One Monte Carlo outcome row. snr_db empty means a noiseless cell; timing
// columns are 0 when the scenario disabled timing. t_offline_ns is the hop
// table acquisition time for the row's density (0 for indirect/direct).
struct TrialRecord {
  int trial = 0;
  std::optional<double> snr_db;
  double density = 1.0;
  Algorithm algorithm = Algorithm::direct;
  Vec2 truth_x = Vec2::Zero(), truth_v = Vec2::Zero();
  Vec2 est_x = Vec2::Zero(), est_v = Vec2::Zero();
  int64_t t_offline_ns = 0;
  int64_t t_online_ns = 0;
};

// What a Monte Carlo trial simulates. Off-grid: the scenario geometry with a
// uniformly drawn target. On-grid: an exact-bin scene on the given grids
// (receivers re-placed per trial). Keyed by (scenario seed, trial) only.
struct SampledScene {
  SceneGeometry geom;
  Target target;
};

SampledScene sample_scene(const Scenario& scenario, const LocationGrid& lgrid,
                          const VelocityGrid& vgrid, uint64_t trial);

// Supplies the hop table for a density cell (e.g. loading a prebuilt file);
// returns the table plus the offline nanoseconds to report. Only consulted
// for off-grid campaigns — on-grid scenes re-place receivers per trial, so
// their tables are built in-trial.
using TableSource =
    std::function<std::pair<HopTable, int64_t>(double density,
                                               const LocationGrid& grid)>;

// Runs the whole campaign. Scenes and noise are keyed by (seed, trial) only,
// so every density/SNR cell sees the same truths and the same underlying
// noise draws. Record order is fixed (density, SNR, trial, algorithm) and
// independent of n_threads.
std::vector<TrialRecord> run_monte_carlo(const Scenario& scenario,
                                         int n_threads = 1,
                                         const TableSource& tables = {});

// Fraction of records of this algorithm whose location error is within the
// threshold.
double hit_ratio(const std::vector<TrialRecord>& records, Algorithm algorithm,
                 double threshold_m);
double mean_online_ns(const std::vector<TrialRecord>& records,
                      Algorithm algorithm);
// RMS velocity error over the records that hit at the threshold; NaN if none.
double velocity_rmse_hits(const std::vector<TrialRecord>& records,
                          Algorithm algorithm, double threshold_m);

std::vector<TrialRecord> filter_cell(const std::vector<TrialRecord>& records,
                                     std::optional<double> density,
                                     std::optional<std::optional<double>> snr_db);

// Per-trial CSV: one row per record, fixed header, %.17g doubles, noiseless
// SNR written as "none".
void write_trial_csv(const std::string& path,
                     const std::vector<TrialRecord>& records);

// Per-cell summary over the threshold sweep.
void write_summary_csv(const std::string& path,
                       const std::vector<TrialRecord>& records,
                       const std::vector<double>& thresholds_m);

}  // namespace gridhop
