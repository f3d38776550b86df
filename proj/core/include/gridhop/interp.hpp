#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "gridhop/model.hpp"

namespace gridhop {

// How an off-grid range atom is expressed on the oversampled FFT grid.
//   nearest: single closest bin, coefficient 1
//   linear:  bracketing pair, barycentric weights
//   poly3:   bracketing triple, least-squares projection onto the three atoms
enum class InterpScheme { nearest = 1, linear = 2, poly3 = 3 };

int scheme_order(InterpScheme s);
std::string_view scheme_name(InterpScheme s);
InterpScheme scheme_from_name(std::string_view name);  // throws with valid names

// r_i = i / os_range for i = 0 .. os_range*n_samples - 1: the range bins the
// zero-padded fast-time FFT evaluates implicitly.
std::vector<double> fft_range_grid(int n_samples, int os_range);

// Least-squares fit of a(r) on up to three FFT-grid atoms. The stored
// coefficients are oriented for direct use against forward-FFT outputs:
// sum_j coeffs[j] * Z[indices[j]] approximates <y, a(r)> for any row y whose
// spectrum Z was taken by fft_rows. (Equivalently: they are the conjugates of
// the coefficients that combine the atoms themselves; the residual is the
// same either way, and on-grid fits are exactly the unit coordinate vector.)
struct AtomFit {
  int k = 0;
  std::array<uint32_t, 3> indices{};
  std::array<cplx, 3> coeffs{};
  double residual = 0.0;  // || a(r) - combined atoms ||_2
};

// r may be any real; fits are periodic in n_samples, so r and r + n_samples
// produce the same (indices, coefficients).
AtomFit fit_atom(int n_samples, int os_range, double r, InterpScheme scheme);

// Precomputed interpolation data for every (location bin, receiver) pair.
struct HopTable {
  InterpScheme scheme = InterpScheme::poly3;
  int k = 3;
  int os_range = 4;
  int n_bins = 0;
  int n_rx = 0;
  int n_samples = 0;
  uint64_t hash = 0;  // scene_hash of the (waveform, geometry) it was built for
  std::vector<uint32_t> indices;  // n_bins * n_rx * k, bin-major receiver-minor
  std::vector<cplx> coeffs;       // same layout
  double max_residual = 0.0;      // worst atom fit seen at build time

  size_t entry_offset(int bin, int q) const {
    return (static_cast<size_t>(bin) * static_cast<size_t>(n_rx) +
            static_cast<size_t>(q)) * static_cast<size_t>(k);
  }
};

// Builds the table for every grid bin; every sensed range must fall inside
// the unambiguous fast-time window [0, n_samples), otherwise the offending
// bins are reported. Deterministic for any n_threads.
HopTable precompute_hop_table(const WaveformConfig& cfg, const SceneGeometry& geom,
                              const LocationGrid& grid, InterpScheme scheme,
                              int os_range, int n_threads = 1);

// GHT1 container (little-endian): magic "GHT1", u32 version/Q/bins/K/os/Ms,
// u64 scene hash, f64 worst fit residual, then per bin per receiver K u32
// indices and K re,im f64 pairs.
void save_hop_table(const std::string& path, const HopTable& table);

// Loads and validates against the scene it is about to serve; a table built
// for different constants, stations, or grid fails with "stale hop table".
HopTable load_hop_table(const std::string& path, const WaveformConfig& cfg,
                        const SceneGeometry& geom, const LocationGrid& grid);

}  // namespace gridhop
