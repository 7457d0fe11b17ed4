#include "mtrp/receiver.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "mtrp/errors.hpp"
#include "mtrp/rng.hpp"

namespace mtrp {

// ---------------------------------------------------------------------------
// Windows

WindowType parse_window(const std::string& name) {
    if (name == "rectangular" || name == "rect" || name == "none") return WindowType::rectangular;
    if (name == "hann") return WindowType::hann;
    if (name == "hamming") return WindowType::hamming;
    if (name == "blackman") return WindowType::blackman;
    throw ConfigError("unknown window '" + name + "'");
}

std::string to_string(WindowType w) {
    switch (w) {
        case WindowType::rectangular: return "rectangular";
        case WindowType::hann: return "hann";
        case WindowType::hamming: return "hamming";
        case WindowType::blackman: return "blackman";
    }
    return "rectangular";
}

std::vector<double> make_window(WindowType type, std::size_t n) {
    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        switch (type) {
            case WindowType::rectangular: break;
            case WindowType::hann: w[i] = 0.5 - 0.5 * std::cos(x); break;
            case WindowType::hamming: w[i] = 0.54 - 0.46 * std::cos(x); break;
            case WindowType::blackman: w[i] = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x); break;
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Map metadata

RadarAxes make_radar_axes(const PrsConfig& prs, std::size_t range_fft_size) {
    RadarAxes a;
    const double comb_spacing = prs.comb_size * prs.subcarrier_spacing_hz;
    a.range_bin_m = kSpeedOfLight / (2.0 * static_cast<double>(range_fft_size) * comb_spacing);
    a.doppler_bin_hz = 1.0 / (prs.occasions_per_cpi * prs.occasion_period_s);
    a.wavelength_m = prs.wavelength_m();
    a.occasion_period_s = prs.occasion_period_s;
    return a;
}

double RangeDopplerMap::doppler_hz(std::size_t doppler_bin) const {
    const auto d = static_cast<double>(doppler_bin);
    const auto M = static_cast<double>(n_doppler);
    return (2 * doppler_bin <= n_doppler ? d : d - M) * axes.doppler_bin_hz;
}

std::vector<Complex> RangeDopplerCube::snapshot(std::size_t range_bin, std::size_t doppler_bin) const {
    std::vector<Complex> s(n_antennas);
    const std::size_t cells = map.n_range * map.n_doppler;
    for (std::size_t n = 0; n < n_antennas; ++n) s[n] = values[n * cells + doppler_bin * map.n_range + range_bin];
    return s;
}

// ---------------------------------------------------------------------------
// Received signal and LS estimate

CsiTensor received_signal(CsiTensor h, std::span<const Complex> symbols, double tx_power_w, double noise_variance,
                          std::uint64_t noise_seed) {
    const std::size_t N = h.n_antennas(), K = h.n_subcarriers(), M = h.n_occasions();
    if (symbols.size() != K * M) throw ContractError("pilot grid does not match the channel tensor");
    if (noise_variance < 0.0) throw ContractError("noise variance must be non-negative");
    const double amp = std::sqrt(tx_power_w);
    const double sigma = std::sqrt(noise_variance / 2.0);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ni = 0; ni < static_cast<std::ptrdiff_t>(N); ++ni) {
        const auto n = static_cast<std::size_t>(ni);
        Rng rng(derive_seed(noise_seed, {static_cast<std::uint64_t>(n)}));
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (std::size_t m = 0; m < M; ++m) {
            auto row = h.row(n, m);
            const Complex* s = symbols.data() + m * K;
            for (std::size_t k = 0; k < K; ++k) {
                Complex v = amp * row[k] * s[k];
                if (sigma > 0.0) {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    v += Complex(sigma * re, sigma * im);
                }
                row[k] = v;
            }
        }
    }
    return h;
}

CsiTensor ls_channel_estimate(CsiTensor y, std::span<const Complex> symbols, double tx_power_w) {
    const std::size_t N = y.n_antennas(), K = y.n_subcarriers(), M = y.n_occasions();
    if (symbols.size() != K * M) throw ContractError("pilot grid does not match the received tensor");
    if (!(tx_power_w > 0.0)) throw ContractError("transmit power must be positive");
    std::vector<Complex> inv(symbols.size());
    const double amp = std::sqrt(tx_power_w);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const double mag2 = std::norm(symbols[i]);
        if (!(mag2 > 0.0)) throw ContractError("zero-magnitude pilot symbol");
        inv[i] = std::conj(symbols[i]) / (amp * mag2);
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ni = 0; ni < static_cast<std::ptrdiff_t>(N); ++ni) {
        const auto n = static_cast<std::size_t>(ni);
        for (std::size_t m = 0; m < M; ++m) {
            auto row = y.row(n, m);
            const Complex* s = inv.data() + m * K;
            for (std::size_t k = 0; k < K; ++k) row[k] *= s[k];
        }
    }
    return y;
}

// ---------------------------------------------------------------------------
// Range-Doppler

RangeDopplerCube range_doppler_map(const CsiTensor& g, const RangeDopplerConfig& cfg, const RadarAxes& axes) {
    const auto wr = make_window(cfg.range_window, g.n_subcarriers());
    const auto wd = make_window(cfg.doppler_window, g.n_occasions());
    RangeDopplerCube cube;
    cube.n_antennas = g.n_antennas();
    kernels::range_doppler_parallel(g, wr, wd, cfg.range_fft_size, cfg.mean_subtraction, cube.values);
    cube.map.n_range = cfg.range_fft_size;
    cube.map.n_doppler = g.n_occasions();
    cube.map.axes = axes;
    cube.map.looks = static_cast<int>(std::max<std::size_t>(g.n_antennas(), 1));
    kernels::noncoherent_power(cube.values, cube.n_antennas, cube.map.n_range * cube.map.n_doppler, cube.map.power);
    return cube;
}

// ---------------------------------------------------------------------------
// CFAR

double cfar_false_alarm_probability(int n_training, double scale, int looks) {
    if (n_training < 1 || looks < 1) throw ContractError("CFAR needs at least one training cell and one look");
    const double c = scale / n_training;
    const double nl = static_cast<double>(n_training) * looks;
    // P_fa = sum_{k<L} C(NL+k-1, k) c^k / (1+c)^{NL+k}, summed in the log domain.
    double acc = 0.0, max_log = -INFINITY;
    std::vector<double> terms(static_cast<std::size_t>(looks));
    for (int k = 0; k < looks; ++k) {
        terms[static_cast<std::size_t>(k)] = std::lgamma(nl + k) - std::lgamma(nl) - std::lgamma(k + 1.0) +
                                             (k > 0 ? k * std::log(c) : 0.0) - (nl + k) * std::log1p(c);
        max_log = std::max(max_log, terms[static_cast<std::size_t>(k)]);
    }
    for (double t : terms) acc += std::exp(t - max_log);
    return std::exp(max_log) * acc;
}

double cfar_scale(int n_training, double pfa, int looks) {
    if (n_training < 1) throw ContractError("CFAR needs at least one training cell");
    if (!(pfa > 0.0 && pfa < 1.0)) throw ContractError("CFAR false-alarm probability must be in (0, 1)");
    if (looks <= 1) return n_training * (std::pow(pfa, -1.0 / n_training) - 1.0);
    // P_fa is strictly decreasing in the scale; bracket then bisect in log space.
    double lo = 1e-9, hi = 1.0;
    while (cfar_false_alarm_probability(n_training, hi, looks) > pfa) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (cfar_false_alarm_probability(n_training, mid, looks) > pfa ? lo : hi) = mid;
        if (hi / lo - 1.0 < 1e-13) break;
    }
    return hi;
}

namespace {

// Caps reported SNR at 150 dB when the training cells are (numerically) empty.
constexpr double kNoiseFloorRelative = 1e-15;

}  // namespace

CfarCells cfar_cells(const RangeDopplerMap& map, const CfarConfig& cfg) {
    const std::size_t R = map.n_range, D = map.n_doppler;
    if (map.power.size() != R * D) throw ContractError("map size mismatch");
    std::vector<double> sum;
    std::vector<int> count;
    kernels::cfar_training_parallel(map.power, R, D, cfg.window(), sum, count);

    const int looks = cfg.integration_correction ? std::max(map.looks, 1) : 1;
    std::map<int, double> scale;
    for (int c : count) {
        if (!scale.contains(c)) scale.emplace(c, cfar_scale(c, cfg.pfa, looks));
    }
    const double floor = *std::max_element(map.power.begin(), map.power.end()) * db2lin(-cfg.dynamic_range_db);
    CfarCells out;
    out.hit.assign(R * D, 0);
    out.noise_level.resize(R * D);
    for (std::size_t i = 0; i < R * D; ++i) {
        out.noise_level[i] = std::max(sum[i] / count[i], floor);
        out.hit[i] = map.power[i] > scale.at(count[i]) * out.noise_level[i] ? 1 : 0;
    }
    return out;
}

std::vector<Detection> cfar_detect(const RangeDopplerMap& map, const CfarConfig& cfg) {
    const std::size_t R = map.n_range, D = map.n_doppler;
    if (map.power.size() != R * D) throw ContractError("map size mismatch");
    if (std::all_of(map.power.begin(), map.power.end(), [](double p) { return p == 0.0; })) return {};

    const CfarCells cells = cfar_cells(map, cfg);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < R * D; ++i) {
        if (cells.hit[i]) order.push_back(i);
    }
    auto stronger = [&](std::size_t a, std::size_t b) {
        return map.power[a] > map.power[b] || (map.power[a] == map.power[b] && a < b);
    };
    std::sort(order.begin(), order.end(), stronger);

    // Hits join in descending power; each region remembers its peak. Where
    // a cell touches several regions the weaker ones fold into the strongest.
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(R * D, kUnset), peak(R * D, kUnset);
    auto root = [&](std::size_t c) {
        while (parent[c] != c) c = parent[c] = parent[parent[c]];
        return c;
    };
    const double split = cfg.split_peaks ? db2lin(cfg.split_prominence_db) : std::numeric_limits<double>::infinity();
    std::vector<std::size_t> peaks, touching;
    for (std::size_t cell : order) {
        const auto d = static_cast<std::ptrdiff_t>(cell / R), r = static_cast<std::ptrdiff_t>(cell % R);
        touching.clear();
        for (int dd = -1; dd <= 1; ++dd) {
            for (int dr = -1; dr <= 1; ++dr) {
                const std::ptrdiff_t rr = r + dr;
                if ((dd == 0 && dr == 0) || rr < 0 || rr >= static_cast<std::ptrdiff_t>(R)) continue;
                const auto nd = static_cast<std::size_t>((d + dd + static_cast<std::ptrdiff_t>(D)) %
                                                         static_cast<std::ptrdiff_t>(D));
                const std::size_t nb = nd * R + static_cast<std::size_t>(rr);
                if (parent[nb] == kUnset) continue;
                const std::size_t rt = root(nb);
                if (std::find(touching.begin(), touching.end(), rt) == touching.end()) touching.push_back(rt);
            }
        }
        if (touching.empty()) {
            parent[cell] = cell;
            peak[cell] = cell;
            continue;
        }
        const std::size_t top = *std::min_element(touching.begin(), touching.end(), [&](std::size_t a, std::size_t b) {
            return stronger(peak[a], peak[b]);
        });
        parent[cell] = top;
        for (std::size_t rt : touching) {
            if (rt == top) continue;
            if (map.power[peak[rt]] >= split * map.power[cell]) peaks.push_back(peak[rt]);
            parent[rt] = top;
        }
    }
    for (std::size_t cell : order) {
        if (parent[cell] == cell) peaks.push_back(peak[cell]);
    }

    std::vector<Detection> out;
    for (std::size_t best : peaks) {
        Detection det;
        det.doppler_bin = best / R;
        det.range_bin = best % R;
        det.range_m = static_cast<double>(det.range_bin) * map.axes.range_bin_m;
        det.doppler_hz = map.doppler_hz(det.doppler_bin);
        det.radial_velocity_mps = det.doppler_hz * map.axes.wavelength_m / 2.0;
        det.peak_power = map.power[best];
        det.noise_level = std::max(cells.noise_level[best], det.peak_power * kNoiseFloorRelative);
        det.snr_linear = det.peak_power / det.noise_level;
        out.push_back(std::move(det));
    }
    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        return std::tie(a.doppler_bin, a.range_bin) < std::tie(b.doppler_bin, b.range_bin);
    });
    return out;
}

void attach_snapshots(std::vector<Detection>& detections, const RangeDopplerCube& cube) {
    for (auto& d : detections) d.snapshot = cube.snapshot(d.range_bin, d.doppler_bin);
}

// ---------------------------------------------------------------------------
// Angle estimation

std::size_t AngleGrid::n_azimuth() const {
    return static_cast<std::size_t>(std::floor((az_max_deg - az_min_deg) / step_deg + 1e-9)) + 1;
}

std::size_t AngleGrid::n_elevation() const {
    return static_cast<std::size_t>(std::floor((el_max_deg - el_min_deg) / step_deg + 1e-9)) + 1;
}

BeamScanner::BeamScanner(const ArrayConfig& array, const AngleGrid& grid) : array_(array) {
    if (!(grid.step_deg > 0.0) || grid.az_max_deg < grid.az_min_deg || grid.el_max_deg < grid.el_min_deg) {
        throw ContractError("invalid angle grid");
    }
    const std::size_t n_el = grid.n_elevation(), n_az = grid.n_azimuth(), N = array.size();
    angles_.reserve(n_el * n_az);
    conj_steering_.reserve(n_el * n_az * N);
    for (std::size_t e = 0; e < n_el; ++e) {
        for (std::size_t a = 0; a < n_az; ++a) {
            const Angles ang{grid.az_min_deg + static_cast<double>(a) * grid.step_deg,
                             grid.el_min_deg + static_cast<double>(e) * grid.step_deg};
            angles_.push_back(ang);
            for (const Complex& v : array_response(array, ang)) conj_steering_.push_back(std::conj(v));
        }
    }
}

Angles BeamScanner::grid_angle(std::size_t index) const { return angles_.at(index); }

Angles BeamScanner::estimate(std::span<const Complex> snapshot) const {
    if (snapshot.size() != array_.size()) throw ContractError("snapshot length does not match the array");
    if (std::all_of(snapshot.begin(), snapshot.end(), [](const Complex& v) { return v == Complex(0.0, 0.0); })) {
        throw EstimationError("angle estimation on an all-zero snapshot");
    }
    std::vector<double> power;
    kernels::beam_scan_parallel(conj_steering_, snapshot, power);
    // First maximum wins so ties resolve identically for any thread count.
    const auto best = std::max_element(power.begin(), power.end());
    return angles_[static_cast<std::size_t>(best - power.begin())];
}

Angles estimate_angle(std::span<const Complex> snapshot, const ArrayConfig& array, const AngleGrid& grid) {
    return BeamScanner(array, grid).estimate(snapshot);
}

Measurement form_measurement(const TrpConfig& trp, const Detection& detection, const Angles& angles) {
    Measurement m;
    m.trp_id = trp.trp_id;
    m.position = trp.position + detection.range_m * local_to_global(trp, angles);
    m.v_r = detection.radial_velocity_mps;
    m.gamma = detection.snr_linear;
    return m;
}

// ---------------------------------------------------------------------------

TrpReceiver::TrpReceiver(const PrsConfig& prs, const ArrayConfig& array, const ReceiverConfig& cfg)
    : cfg_(cfg), axes_(make_radar_axes(prs, cfg.range_doppler.range_fft_size)), scanner_(array, cfg.angle_grid) {}

TrpReceiver::Output TrpReceiver::process(const TrpConfig& trp, const CsiTensor& g_hat, bool keep_map) const {
    Output out;
    const RangeDopplerCube cube = range_doppler_map(g_hat, cfg_.range_doppler, axes_);
    out.detections = cfar_detect(cube.map, cfg_.cfar);
    attach_snapshots(out.detections, cube);
    out.measurements.reserve(out.detections.size());
    for (const auto& det : out.detections) {
        out.measurements.push_back(form_measurement(trp, det, scanner_.estimate(det.snapshot)));
    }
    if (keep_map) out.map = cube.map;
    return out;
}

}  // namespace mtrp
