// Microbenchmarks for the hot paths: the per-bin decision kernels, the three
// end-to-end estimators, and hop table construction. Sizes mirror the bench
// CLI defaults; the point is relative cost, not absolute timing.

#include <benchmark/benchmark.h>

#include "gridhop/direct.hpp"
#include "gridhop/hopping.hpp"
#include "gridhop/indirect.hpp"
#include "gridhop/synth.hpp"

using namespace gridhop;

namespace {

struct Fixture {
  WaveformConfig cfg;
  SceneGeometry geom;
  LocationGrid lgrid;
  VelocityGrid vgrid;
  FrameSet frame;
  HopTable table;
  std::vector<CMat> spectra;

  explicit Fixture(double density) {
    cfg.f0 = 77.0e9;
    cfg.bandwidth = 300.0e6;
    cfg.chirp_duration = 5.0e-5;
    cfg.n_chirps = 64;
    cfg.n_samples = 256;
    geom.tx = {0.0, 0.0};
    geom.rx = {{-14.0, 8.0}, {16.0, 5.0}, {2.0, -11.0}};
    lgrid = LocationGrid::build(cfg, {-8.0, -6.0}, {15.0, 12.0}, density);
    vgrid = VelocityGrid::build(cfg, 15.0, 1.0);

    Target t;
    t.x = {2.3, 1.7};
    t.v = {4.0, -3.0};
    t.alpha = {1.0, 0.0};
    frame = synthesize_frame(cfg, geom, {t}, NoiseSpec{10.0, 1.0, 7}, 0);

    table = precompute_hop_table(cfg, geom, lgrid, InterpScheme::poly3, 4);
    spectra = fast_time_spectra(frame, table.os_range);
  }
};

Fixture& fixture(double density) {
  static Fixture f1(1.0);
  static Fixture f2(2.0);
  return density < 1.5 ? f1 : f2;
}

void bm_location_decision(benchmark::State& state) {
  const Fixture& f = fixture(2.0);
  int bin = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        location_decision(f.cfg, f.geom, f.frame, f.lgrid.point(bin)));
    bin = (bin + 1) % f.lgrid.size();
  }
}
BENCHMARK(bm_location_decision);

void bm_hop_decision(benchmark::State& state) {
  const Fixture& f = fixture(2.0);
  int bin = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hop_location_decision(f.spectra, f.table, bin));
    bin = (bin + 1) % f.table.n_bins;
  }
}
BENCHMARK(bm_hop_decision);

void bm_fast_time_spectra(benchmark::State& state) {
  const Fixture& f = fixture(2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(fast_time_spectra(f.frame, f.table.os_range));
}
BENCHMARK(bm_fast_time_spectra);

void bm_range_doppler_map(benchmark::State& state) {
  const Fixture& f = fixture(2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(range_doppler_map(f.frame[0], 4, 1));
}
BENCHMARK(bm_range_doppler_map);

void bm_indirect_estimate(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        indirect_estimate(f.cfg, f.geom, f.frame, f.lgrid, f.vgrid, 4, 1));
  state.counters["bins"] = f.lgrid.size();
}
BENCHMARK(bm_indirect_estimate)->Arg(1)->Arg(2);

void bm_direct_estimate(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        direct_estimate(f.cfg, f.geom, f.frame, f.lgrid, f.vgrid));
  state.counters["bins"] = f.lgrid.size();
}
BENCHMARK(bm_direct_estimate)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void bm_hop_estimate(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        hop_estimate(f.cfg, f.geom, f.frame, f.table, f.lgrid, f.vgrid));
  state.counters["bins"] = f.lgrid.size();
}
BENCHMARK(bm_hop_estimate)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void bm_hop_table_build(benchmark::State& state) {
  const Fixture& f = fixture(2.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        precompute_hop_table(f.cfg, f.geom, f.lgrid, InterpScheme::poly3, 4));
  state.counters["bins"] = f.lgrid.size();
}
BENCHMARK(bm_hop_table_build)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
