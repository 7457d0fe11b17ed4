#include "mtrp/waveform.hpp"

#include <array>
#include <string>

#include "mtrp/errors.hpp"

namespace mtrp {

namespace {

struct RbEntry {
    double scs_khz;
    double bw_mhz;
    int n_rb;
};

// TS 38.101-1 Table 5.3.2-1 (FR1 maximum transmission bandwidth configuration).
constexpr std::array<RbEntry, 36> kNrRbTable{{
    {15, 5, 25},   {15, 10, 52},  {15, 15, 79},  {15, 20, 106}, {15, 25, 133}, {15, 30, 160},
    {15, 40, 216}, {15, 50, 270}, {30, 5, 11},   {30, 10, 24},  {30, 15, 38},  {30, 20, 51},
    {30, 25, 65},  {30, 30, 78},  {30, 40, 106}, {30, 50, 133}, {30, 60, 162}, {30, 70, 189},
    {30, 80, 217}, {30, 90, 245}, {30, 100, 273}, {60, 10, 11}, {60, 15, 18},  {60, 20, 24},
    {60, 25, 31},  {60, 30, 38},  {60, 40, 51},  {60, 50, 65},  {60, 60, 79},  {60, 70, 93},
    {60, 80, 107}, {60, 90, 121}, {60, 100, 135}, {15, 35, 188}, {15, 45, 242}, {30, 35, 92},
}};

}  // namespace

int nr_max_resource_blocks(double bandwidth_hz, double subcarrier_spacing_hz) {
    for (const auto& e : kNrRbTable) {
        if (std::abs(e.scs_khz * 1e3 - subcarrier_spacing_hz) < 1e-6 && std::abs(e.bw_mhz * 1e6 - bandwidth_hz) < 1e-3) {
            return e.n_rb;
        }
    }
    return 0;
}

std::size_t PrsConfig::active_subcarriers() const {
    if (n_subcarriers > 0) return static_cast<std::size_t>(n_subcarriers);
    if (const int rb = nr_max_resource_blocks(bandwidth_hz, subcarrier_spacing_hz); rb > 0) {
        return static_cast<std::size_t>(12 * rb);
    }
    const auto raw = static_cast<std::size_t>(std::floor(bandwidth_hz / subcarrier_spacing_hz));
    return raw / 12 * 12;
}

std::size_t PrsConfig::prs_subcarrier_count() const {
    const std::size_t n = active_subcarriers();
    const auto k = static_cast<std::size_t>(comb_size);
    const auto off = static_cast<std::size_t>(comb_offset);
    return n > off ? (n - off + k - 1) / k : 0;
}

std::vector<std::size_t> prs_subcarriers(const PrsConfig& cfg) {
    if (cfg.comb_size < 1) throw ConfigValidationError("waveform.comb_size", "must be >= 1");
    if (cfg.comb_offset < 0 || cfg.comb_offset >= cfg.comb_size) {
        throw ConfigValidationError("waveform.comb_offset", "must satisfy 0 <= offset < comb_size");
    }
    const std::size_t n = cfg.active_subcarriers();
    std::vector<std::size_t> idx;
    idx.reserve(cfg.prs_subcarrier_count());
    for (auto k = static_cast<std::size_t>(cfg.comb_offset); k < n; k += static_cast<std::size_t>(cfg.comb_size)) {
        idx.push_back(k);
    }
    return idx;
}

std::vector<double> cpi_timeline(const PrsConfig& cfg) {
    std::vector<double> t(static_cast<std::size_t>(std::max(cfg.occasions_per_cpi, 0)));
    for (std::size_t m = 0; m < t.size(); ++m) t[m] = static_cast<double>(m) * cfg.occasion_period_s;
    return t;
}

PrsGrid make_prs_grid(const PrsConfig& cfg) {
    PrsGrid g;
    const double center = static_cast<double>(cfg.active_subcarriers()) / 2.0;
    for (const std::size_t k : prs_subcarriers(cfg)) {
        g.frequencies_hz.push_back((static_cast<double>(k) - center) * cfg.subcarrier_spacing_hz);
    }
    g.occasion_times_s = cpi_timeline(cfg);
    return g;
}

OverheadReport sensing_overhead(int l_occ, int l_sym, double t_cpi_s, double t_refresh_s) {
    if (l_sym <= 0) throw ConfigValidationError("l_sym", "must be positive");
    if (l_occ < 0 || l_occ > l_sym) throw ConfigValidationError("l_occ", "must satisfy 0 <= l_occ <= l_sym");
    if (!(t_cpi_s > 0.0)) throw ConfigValidationError("t_cpi", "must be positive");
    if (t_refresh_s < t_cpi_s) throw ConfigValidationError("t_refresh", "refresh interval shorter than the CPI");
    OverheadReport r;
    r.l_occ = l_occ;
    r.l_sym = l_sym;
    r.t_cpi_s = t_cpi_s;
    r.t_refresh_s = t_refresh_s;
    r.eta_cpi = static_cast<double>(l_occ) / static_cast<double>(l_sym);
    r.eta_eff = r.eta_cpi * t_cpi_s / t_refresh_s;
    return r;
}

double noise_power_w(const PrsConfig& cfg) {
    const double dbm = kThermalNoiseDbmPerHz + 10.0 * std::log10(cfg.subcarrier_spacing_hz) + cfg.noise_figure_db;
    return dbm2watt(dbm);
}

double occasion_noise_variance_w(const PrsConfig& cfg) {
    return noise_power_w(cfg) / static_cast<double>(std::max(cfg.symbols_per_occasion, 1));
}

double tx_power_per_re_w(const PrsConfig& cfg) {
    return dbm2watt(cfg.tx_power_dbm) / static_cast<double>(cfg.active_subcarriers());
}

std::vector<Complex> prs_symbols(std::size_t n_subcarriers, std::size_t n_occasions, Rng& rng) {
    std::uniform_int_distribution<int> quadrant(0, 3);
    const double a = std::sqrt(0.5);
    std::vector<Complex> s(n_subcarriers * n_occasions);
    for (auto& v : s) {
        const int b = quadrant(rng);
        v = Complex((b & 1) ? -a : a, (b & 2) ? -a : a);
    }
    return s;
}

}  // namespace mtrp
