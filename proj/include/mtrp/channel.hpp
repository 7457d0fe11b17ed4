#pragma once

#include <span>
#include <vector>

#include "mtrp/common.hpp"
#include "mtrp/geometry.hpp"
#include "mtrp/rng.hpp"
#include "mtrp/scenario.hpp"
#include "mtrp/waveform.hpp"

namespace mtrp {

/// One monostatic propagation path. `gain` is the linear complex amplitude
/// (|gain|^2 is the round-trip power ratio seen by one receive element).
struct PathComponent {
    double delay_s = 0.0;    ///< round trip
    double doppler_hz = 0.0;
    Complex gain{0.0, 0.0};
    Angles aoa;
    Angles aod;
    bool is_clutter = false;
    int source = -1;  ///< target index, -1 for clutter

    double power() const { return std::norm(gain); }
};

/// Extra scattered components per target on top of the LOS echo.
struct TargetMultipath {
    int paths_per_target = 1;
    double max_excess_delay_s = 100e-9;
    double power_step_db = 10.0;  ///< mean attenuation per extra path relative to LOS
    double angle_spread_deg = 5.0;

    bool operator==(const TargetMultipath&) const = default;
};

/// Static ground reference points around a TRP. Amplitude 10^{-(PL+SF)/20}
/// with PL = reference_loss_db + 10 * exponent * log10(d / 1 m).
struct ClutterConfig {
    bool enabled = true;
    int n_reference_points = 20;
    double radius_m = 500.0;
    double min_radius_m = 10.0;
    double half_width_deg = 60.0;
    double height_m = 0.0;
    double pathloss_exponent = 3.0;
    double reference_loss_db = 89.0;  ///< two-way free space at 1 m, 4 GHz
    double shadow_fading_std_db = 6.0;

    bool operator==(const ClutterConfig&) const = default;
};

/// Frequency-domain channel samples laid out as [antenna][occasion][subcarrier]
/// so each (antenna, occasion) row is contiguous for range processing.
class CsiTensor {
public:
    CsiTensor() = default;
    CsiTensor(std::size_t n_antennas, std::size_t n_subcarriers, std::size_t n_occasions)
        : n_ant_(n_antennas), n_sc_(n_subcarriers), n_occ_(n_occasions),
          data_(n_antennas * n_subcarriers * n_occasions, Complex(0.0, 0.0)) {}

    std::size_t n_antennas() const { return n_ant_; }
    std::size_t n_subcarriers() const { return n_sc_; }
    std::size_t n_occasions() const { return n_occ_; }

    Complex& at(std::size_t n, std::size_t k, std::size_t m) { return data_[(n * n_occ_ + m) * n_sc_ + k]; }
    const Complex& at(std::size_t n, std::size_t k, std::size_t m) const { return data_[(n * n_occ_ + m) * n_sc_ + k]; }

    std::span<Complex> row(std::size_t n, std::size_t m) { return {data_.data() + (n * n_occ_ + m) * n_sc_, n_sc_}; }
    std::span<const Complex> row(std::size_t n, std::size_t m) const {
        return {data_.data() + (n * n_occ_ + m) * n_sc_, n_sc_};
    }

    std::span<Complex> data() { return data_; }
    std::span<const Complex> data() const { return data_; }

private:
    std::size_t n_ant_ = 0;
    std::size_t n_sc_ = 0;
    std::size_t n_occ_ = 0;
    std::vector<Complex> data_;
};

/// Echo paths of one target. The first path is the LOS echo from the radar
/// equation; extra paths (if configured) follow with excess delay.
std::vector<PathComponent> target_paths(const TrpConfig& trp, const TargetTruth& target, double carrier_hz,
                                        Rng& rng, const TargetMultipath& multipath = {}, int source = 0);

/// Monostatic radar-equation power ratio G_tx G_rx lambda^2 sigma / ((4 pi)^3 d^4).
double radar_equation_gain(double gain_tx_dbi, double gain_rx_dbi, double wavelength_m, double rcs_dbsm,
                           double range_m);

std::vector<PathComponent> clutter_paths(const TrpConfig& trp, const ClutterConfig& cfg, Rng& rng);

/// Keeps paths whose power is within `threshold_db` of the strongest.
std::vector<PathComponent> cull_paths(std::vector<PathComponent> paths, double threshold_db = 40.0);

/// H[n,k,m] = sum_p gain_p exp(-j2 pi f_k tau_p) exp(j2 pi nu_p t_m) a_n(aoa_p).
CsiTensor synthesize_csi(std::span<const PathComponent> paths, const PrsGrid& grid, const ArrayConfig& array);

}  // namespace mtrp
