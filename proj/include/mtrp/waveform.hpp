#pragma once

#include <cstddef>
#include <vector>

#include "mtrp/common.hpp"
#include "mtrp/rng.hpp"

namespace mtrp {

/// PRS comb resource grid and slow-time timeline.
struct PrsConfig {
    double carrier_hz = 4.0e9;
    double bandwidth_hz = 100.0e6;
    double subcarrier_spacing_hz = 30.0e3;
    /// Active subcarriers; 0 derives the NR maximum transmission bandwidth
    /// for (bandwidth, spacing), or floor(B / df) rounded down to whole
    /// resource blocks when the pair is not tabulated.
    int n_subcarriers = 0;
    int comb_size = 2;
    int comb_offset = 0;
    int symbols_per_occasion = 2;
    double occasion_period_s = 1.0e-3;
    int occasions_per_cpi = 128;
    double tx_power_dbm = 52.0;
    double noise_figure_db = 9.0;
    int slot_symbols = 14;

    std::size_t active_subcarriers() const;
    std::size_t prs_subcarrier_count() const;
    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    double cpi_duration_s() const { return occasions_per_cpi * occasion_period_s; }

    bool operator==(const PrsConfig&) const = default;
};

struct OverheadReport {
    double eta_cpi = 0.0;
    double eta_eff = 0.0;
    int l_occ = 0;
    int l_sym = 0;
    double t_cpi_s = 0.0;
    double t_refresh_s = 0.0;
};

/// Frequencies (centered baseband) and start times sampled by the comb.
struct PrsGrid {
    std::vector<double> frequencies_hz;
    std::vector<double> occasion_times_s;
};

/// NR maximum resource blocks (TS 38.101-1) for common FR1 pairs, or 0.
int nr_max_resource_blocks(double bandwidth_hz, double subcarrier_spacing_hz);

std::vector<std::size_t> prs_subcarriers(const PrsConfig& cfg);

std::vector<double> cpi_timeline(const PrsConfig& cfg);

PrsGrid make_prs_grid(const PrsConfig& cfg);

OverheadReport sensing_overhead(int l_occ, int l_sym, double t_cpi_s, double t_refresh_s);

/// Thermal noise per resource element in watts: kT * df * NF.
double noise_power_w(const PrsConfig& cfg);

/// Noise variance of one occasion after coherently averaging its
/// `symbols_per_occasion` PRS symbols.
double occasion_noise_variance_w(const PrsConfig& cfg);

/// Per-resource-element transmit power: total power spread evenly over all
/// active subcarriers.
double tx_power_per_re_w(const PrsConfig& cfg);

/// Unit-modulus QPSK pilots laid out as [occasion][prs subcarrier].
std::vector<Complex> prs_symbols(std::size_t n_subcarriers, std::size_t n_occasions, Rng& rng);

}  // namespace mtrp
