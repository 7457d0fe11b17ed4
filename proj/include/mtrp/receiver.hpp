#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtrp/channel.hpp"
#include "mtrp/common.hpp"
#include "mtrp/geometry.hpp"
#include "mtrp/kernels.hpp"
#include "mtrp/waveform.hpp"

namespace mtrp {

enum class WindowType { rectangular, hann, hamming, blackman };

WindowType parse_window(const std::string& name);
std::string to_string(WindowType w);

/// DFT-even (periodic) window of length n.
std::vector<double> make_window(WindowType type, std::size_t n);

struct RangeDopplerConfig {
    std::size_t range_fft_size = 2048;
    WindowType range_window = WindowType::hann;
    WindowType doppler_window = WindowType::hann;
    bool mean_subtraction = true;

    bool operator==(const RangeDopplerConfig&) const = default;
};

/// Bin geometry shared by a map and its detections.
struct RadarAxes {
    double range_bin_m = 0.0;     ///< one-way
    double doppler_bin_hz = 0.0;
    double wavelength_m = 0.0;
    double occasion_period_s = 0.0;
};

RadarAxes make_radar_axes(const PrsConfig& prs, std::size_t range_fft_size);

/// Noncoherent detection map, power laid out [doppler][range].
struct RangeDopplerMap {
    std::size_t n_range = 0;
    std::size_t n_doppler = 0;
    std::vector<double> power;
    RadarAxes axes;
    int looks = 1;  ///< number of noncoherently summed channels

    double at(std::size_t range_bin, std::size_t doppler_bin) const { return power[doppler_bin * n_range + range_bin]; }
    double max_range_m() const { return static_cast<double>(n_range) * axes.range_bin_m; }
    double max_doppler_hz() const { return 0.5 / axes.occasion_period_s; }
    /// Signed Doppler of a bin in (-1/(2T), 1/(2T)].
    double doppler_hz(std::size_t doppler_bin) const;
};

/// Per-antenna complex cube [antenna][doppler][range] plus the combined map.
struct RangeDopplerCube {
    std::size_t n_antennas = 0;
    std::vector<Complex> values;
    RangeDopplerMap map;

    std::vector<Complex> snapshot(std::size_t range_bin, std::size_t doppler_bin) const;
};

struct Detection {
    std::size_t range_bin = 0;
    std::size_t doppler_bin = 0;
    double range_m = 0.0;
    double doppler_hz = 0.0;
    double radial_velocity_mps = 0.0;
    double peak_power = 0.0;
    double noise_level = 0.0;
    double snr_linear = 0.0;
    std::vector<Complex> snapshot;
};

/// Per-TRP report m = [x, y, z, v_r, gamma].
struct Measurement {
    int trp_id = 0;
    Position3D position = Position3D::Zero();
    double v_r = 0.0;
    double gamma = 0.0;  ///< linear SNR
};

struct CfarConfig {
    int guard_range = 2;
    int guard_doppler = 2;
    int train_range = 8;
    int train_doppler = 8;
    double pfa = 1e-4;
    /// Size the threshold for the number of noncoherently integrated looks
    /// the map carries (RangeDopplerMap::looks). When false the single-look
    /// design N_t (P_fa^{-1/N_t} - 1) is used regardless of the map.
    bool integration_correction = true;
    /// The noise estimate never drops below the map peak minus this many dB.
    /// Noiseless maps otherwise fire on window sidelobes and FFT roundoff.
    double dynamic_range_db = 80.0;
    /// Split a connected group of hits at a saddle: a secondary peak at least
    /// this many dB above the weakest cell joining it to a stronger peak is
    /// reported separately. Off means plain connected components.
    bool split_peaks = true;
    double split_prominence_db = 1.5;

    kernels::CfarWindow window() const { return {guard_range, guard_doppler, train_range, train_doppler}; }
    bool operator==(const CfarConfig&) const = default;
};

/// Threshold multiplier on the training-cell mean giving `pfa` for a test
/// cell that is the sum of `looks` exponential cells. For looks = 1 this is
/// N_t (P_fa^{-1/N_t} - 1).
double cfar_scale(int n_training, double pfa, int looks = 1);

/// Exact false-alarm probability of the CA-CFAR test at a given scale.
double cfar_false_alarm_probability(int n_training, double scale, int looks = 1);

struct AngleGrid {
    double az_min_deg = -60.0;
    double az_max_deg = 60.0;
    double el_min_deg = -10.0;
    double el_max_deg = 90.0;
    double step_deg = 1.0;

    std::size_t n_azimuth() const;
    std::size_t n_elevation() const;
    bool operator==(const AngleGrid&) const = default;
};

struct ReceiverConfig {
    RangeDopplerConfig range_doppler;
    CfarConfig cfar;
    AngleGrid angle_grid;

    bool operator==(const ReceiverConfig&) const = default;
};

/// y = sqrt(P) H s + n with n ~ CN(0, noise_variance). Noise for antenna n is
/// drawn from substream derive_seed(noise_seed, n).
CsiTensor received_signal(CsiTensor h, std::span<const Complex> symbols, double tx_power_w, double noise_variance,
                          std::uint64_t noise_seed);

/// g = y s* / (sqrt(P) |s|^2). `symbols` is [occasion][prs subcarrier].
CsiTensor ls_channel_estimate(CsiTensor y, std::span<const Complex> symbols, double tx_power_w);

RangeDopplerCube range_doppler_map(const CsiTensor& g, const RangeDopplerConfig& cfg, const RadarAxes& axes);

/// Per-cell outcome of the CA-CFAR test, laid out like the map.
struct CfarCells {
    std::vector<std::uint8_t> hit;
    std::vector<double> noise_level;  ///< training-cell mean
};

CfarCells cfar_cells(const RangeDopplerMap& map, const CfarConfig& cfg);

/// 2-D CA-CFAR with 8-connected peak merging (Doppler wraps, range does not).
/// Each group of hits reports its maximum, plus any secondary peak that passes
/// the saddle test in CfarConfig. Detections are returned without snapshots,
/// ordered by (doppler bin, range bin).
std::vector<Detection> cfar_detect(const RangeDopplerMap& map, const CfarConfig& cfg);

void attach_snapshots(std::vector<Detection>& detections, const RangeDopplerCube& cube);

/// Conventional (Bartlett) beam scan over a fixed grid. The steering matrix
/// is built once per array and reused for every snapshot.
class BeamScanner {
public:
    BeamScanner(const ArrayConfig& array, const AngleGrid& grid);

    Angles estimate(std::span<const Complex> snapshot) const;
    Angles grid_angle(std::size_t index) const;
    std::size_t size() const { return angles_.size(); }
    const ArrayConfig& array() const { return array_; }

private:
    ArrayConfig array_;
    std::vector<Angles> angles_;
    std::vector<Complex> conj_steering_;
};

Angles estimate_angle(std::span<const Complex> snapshot, const ArrayConfig& array, const AngleGrid& grid);

Measurement form_measurement(const TrpConfig& trp, const Detection& detection, const Angles& angles);

/// The per-TRP chain from an estimated channel to measurement vectors.
class TrpReceiver {
public:
    TrpReceiver(const PrsConfig& prs, const ArrayConfig& array, const ReceiverConfig& cfg);

    struct Output {
        std::vector<Detection> detections;
        std::vector<Measurement> measurements;
        RangeDopplerMap map;  ///< populated only when requested
    };

    Output process(const TrpConfig& trp, const CsiTensor& g_hat, bool keep_map = false) const;

    const RadarAxes& axes() const { return axes_; }

private:
    ReceiverConfig cfg_;
    RadarAxes axes_;
    BeamScanner scanner_;
};

}  // namespace mtrp
