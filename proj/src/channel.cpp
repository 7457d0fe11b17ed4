#include "mtrp/channel.hpp"

#include <algorithm>

#include "mtrp/errors.hpp"
#include "mtrp/kernels.hpp"

namespace mtrp {

double radar_equation_gain(double gain_tx_dbi, double gain_rx_dbi, double wavelength_m, double rcs_dbsm,
                           double range_m) {
    const double four_pi_cubed = std::pow(4.0 * kPi, 3);
    return db2lin(gain_tx_dbi) * db2lin(gain_rx_dbi) * wavelength_m * wavelength_m * db2lin(rcs_dbsm) /
           (four_pi_cubed * std::pow(range_m, 4));
}

std::vector<PathComponent> target_paths(const TrpConfig& trp, const TargetTruth& target, double carrier_hz,
                                        Rng& rng, const TargetMultipath& multipath, int source) {
    const LosGeometry los = los_geometry(trp, target.position);
    const double lambda = kSpeedOfLight / carrier_hz;
    const double g_el = element_gain_dbi(trp.array, los.angles);
    const double power = radar_equation_gain(g_el, g_el, lambda, target.rcs_dbsm, los.range_m);

    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    PathComponent p;
    p.delay_s = 2.0 * los.range_m / kSpeedOfLight;
    p.doppler_hz = 2.0 * target.velocity.dot(los.unit_vector) / lambda;
    p.gain = std::polar(std::sqrt(power), phase(rng));
    p.aoa = los.angles;
    p.aod = los.angles;
    p.source = source;

    std::vector<PathComponent> out{p};
    for (int i = 1; i < multipath.paths_per_target; ++i) {
        PathComponent extra = p;
        extra.delay_s += multipath.max_excess_delay_s * unit(rng);
        const double atten_db = multipath.power_step_db * i;
        extra.gain = std::polar(std::sqrt(power * db2lin(-atten_db)), phase(rng));
        extra.aoa.azimuth_deg =
            wrap_azimuth_deg(p.aoa.azimuth_deg + multipath.angle_spread_deg * (2.0 * unit(rng) - 1.0));
        extra.aoa.elevation_deg = std::clamp(
            p.aoa.elevation_deg + multipath.angle_spread_deg * (2.0 * unit(rng) - 1.0), -90.0, 90.0);
        extra.aod = extra.aoa;
        out.push_back(extra);
    }
    return out;
}

std::vector<PathComponent> clutter_paths(const TrpConfig& trp, const ClutterConfig& cfg, Rng& rng) {
    std::vector<PathComponent> out;
    if (!cfg.enabled || cfg.n_reference_points <= 0) return out;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::normal_distribution<double> shadow(0.0, std::max(cfg.shadow_fading_std_db, 0.0));

    const double r0 = std::max(cfg.min_radius_m, 0.0), r1 = std::max(cfg.radius_m, r0);
    out.reserve(static_cast<std::size_t>(cfg.n_reference_points));
    for (int i = 0; i < cfg.n_reference_points; ++i) {
        const double r = std::sqrt(r0 * r0 + unit(rng) * (r1 * r1 - r0 * r0));
        const double az = deg2rad(trp.boresight_azimuth_deg + cfg.half_width_deg * (2.0 * unit(rng) - 1.0));
        const Position3D point(trp.position.x() + r * std::cos(az), trp.position.y() + r * std::sin(az), cfg.height_m);
        const LosGeometry los = los_geometry(trp, point);
        const double sf = cfg.shadow_fading_std_db > 0.0 ? shadow(rng) : 0.0;
        const double pl = cfg.reference_loss_db + 10.0 * cfg.pathloss_exponent * std::log10(los.range_m);

        PathComponent p;
        p.delay_s = 2.0 * los.range_m / kSpeedOfLight;
        p.doppler_hz = 0.0;
        p.gain = std::polar(std::pow(10.0, -(pl + sf) / 20.0), phase(rng));
        p.aoa = los.angles;
        p.aod = los.angles;
        p.is_clutter = true;
        p.source = -1;
        out.push_back(p);
    }
    return out;
}

std::vector<PathComponent> cull_paths(std::vector<PathComponent> paths, double threshold_db) {
    if (!(threshold_db > 0.0)) throw ContractError("cull threshold must be positive");
    if (paths.empty()) return paths;
    const double strongest =
        std::max_element(paths.begin(), paths.end(), [](const auto& a, const auto& b) { return a.power() < b.power(); })
            ->power();
    if (strongest <= 0.0) return paths;
    std::erase_if(paths, [&](const PathComponent& p) {
        return !(p.power() > 0.0) || 10.0 * std::log10(p.power() / strongest) < -threshold_db;
    });
    return paths;
}

CsiTensor synthesize_csi(std::span<const PathComponent> paths, const PrsGrid& grid, const ArrayConfig& array) {
    if (array.n_rows < 1 || array.n_cols < 1) throw ContractError("array must have at least one element");
    CsiTensor h;
    kernels::synthesize_csi_parallel(paths, grid, array, h);
    return h;
}

}  // namespace mtrp
