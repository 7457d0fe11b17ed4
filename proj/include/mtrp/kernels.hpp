#pragma once

// Data-parallel inner loops of the sensing chain. Each kernel comes in two
// flavors with identical signatures:
//   *_reference : straightforward serial code (direct sums, naive DFTs) kept
//                 as the test oracle;
//   *_parallel  : the production path (factorized sums, FFTW, OpenMP).
// Both write into caller-owned outputs; the parallel versions produce results
// independent of the OpenMP thread count.

#include <span>
#include <vector>

#include "mtrp/channel.hpp"
#include "mtrp/common.hpp"
#include "mtrp/geometry.hpp"
#include "mtrp/waveform.hpp"

namespace mtrp::kernels {

// ---- CSI synthesis -------------------------------------------------------

void synthesize_csi_reference(std::span<const PathComponent> paths, const PrsGrid& grid, const ArrayConfig& array,
                              CsiTensor& out);
void synthesize_csi_parallel(std::span<const PathComponent> paths, const PrsGrid& grid, const ArrayConfig& array,
                             CsiTensor& out);

// ---- Range / Doppler processing -----------------------------------------
//
// Input g is [antenna][occasion][subcarrier]. Output cube is
// [antenna][doppler bin][range bin]:
//   r[n,m]   = 1/sqrt(N_R) sum_k w_R[k] g[k,m] exp(+j2 pi k n / N_R)
//   r[n,m]  -= mean_m r[n,m]                       (if mean_subtraction)
//   X[n,d]   = 1/sqrt(M) sum_m w_D[m] r[n,m] exp(-j2 pi m d / M)

void range_doppler_reference(const CsiTensor& g, std::span<const double> range_window,
                             std::span<const double> doppler_window, std::size_t n_range, bool mean_subtraction,
                             std::vector<Complex>& cube);
void range_doppler_parallel(const CsiTensor& g, std::span<const double> range_window,
                            std::span<const double> doppler_window, std::size_t n_range, bool mean_subtraction,
                            std::vector<Complex>& cube);

/// Sum over antennas of |cube|^2, laid out [doppler][range].
void noncoherent_power(std::span<const Complex> cube, std::size_t n_antennas, std::size_t n_cells,
                       std::vector<double>& power);

// ---- CA-CFAR training statistics ----------------------------------------

/// Training region: the box of half-widths (guard + train) around the cell
/// minus the guard box. Doppler wraps around; range is clipped at the edges.
struct CfarWindow {
    int guard_range = 2;
    int guard_doppler = 2;
    int train_range = 8;
    int train_doppler = 8;
};

/// For every cell of a [doppler][range] power map, the sum and count of
/// training cells.
void cfar_training_reference(std::span<const double> power, std::size_t n_range, std::size_t n_doppler,
                             const CfarWindow& window, std::vector<double>& sum, std::vector<int>& count);
void cfar_training_parallel(std::span<const double> power, std::size_t n_range, std::size_t n_doppler,
                            const CfarWindow& window, std::vector<double>& sum, std::vector<int>& count);

// ---- Beam scan -----------------------------------------------------------

/// power[i] = |sum_n conj_steering[i, n] * snapshot[n]|^2 where
/// conj_steering is row-major [angle][element] and already conjugated.
void beam_scan_reference(std::span<const Complex> conj_steering, std::span<const Complex> snapshot,
                         std::vector<double>& power);
void beam_scan_parallel(std::span<const Complex> conj_steering, std::span<const Complex> snapshot,
                        std::vector<double>& power);

}  // namespace mtrp::kernels
