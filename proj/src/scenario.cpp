#include "mtrp/scenario.hpp"

#include <string>

#include "mtrp/errors.hpp"

namespace mtrp {

double sample_rcs(const RcsModel& model, Rng& rng) {
    if (model.fluctuation_std_db <= 0.0) return model.mean_dbsm;
    std::normal_distribution<double> fluct(0.0, model.fluctuation_std_db);
    return model.mean_dbsm + fluct(rng);
}

std::vector<TargetTruth> sample_targets(const DropConfig& cfg, Rng& rng) {
    const SectorRegion& s = cfg.sector;
    if (cfg.n_targets < 0) throw ScenarioError("n_targets must be non-negative");
    if (!(s.radius_m > 0.0) || !(s.half_width_deg > 0.0) || cfg.altitude_max_m < cfg.altitude_min_m) {
        throw ScenarioError("degenerate sector region");
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<TargetTruth> targets;
    targets.reserve(static_cast<std::size_t>(cfg.n_targets));
    const double min_sep2 = cfg.min_separation_m * cfg.min_separation_m;

    for (int q = 0; q < cfg.n_targets; ++q) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            // Uniform in area: radius ~ R sqrt(u).
            const double r = s.radius_m * std::sqrt(unit(rng));
            const double az = deg2rad(s.boresight_deg + s.half_width_deg * (2.0 * unit(rng) - 1.0));
            const double z = cfg.altitude_min_m + (cfg.altitude_max_m - cfg.altitude_min_m) * unit(rng);
            const Position3D p(s.apex.x() + r * std::cos(az), s.apex.y() + r * std::sin(az), z);

            bool ok = true;
            for (const auto& k : cfg.keep_out) ok = ok && (p - k).squaredNorm() >= min_sep2;
            for (const auto& t : targets) ok = ok && (p - t.position).squaredNorm() >= min_sep2;
            if (!ok) continue;

            TargetTruth t;
            t.position = p;
            const double speed = cfg.max_speed_mps * unit(rng);
            const double heading = 2.0 * kPi * unit(rng);
            t.velocity = Vec3(speed * std::cos(heading), speed * std::sin(heading), 0.0);
            t.rcs_dbsm = sample_rcs(cfg.rcs, rng);
            targets.push_back(t);
            placed = true;
        }
        if (!placed) {
            throw ScenarioError("could not place target " + std::to_string(q) + " after " +
                                std::to_string(kMaxPlacementAttempts) + " attempts (region too small)");
        }
    }
    return targets;
}

std::vector<TargetTruth> sample_targets(const DropConfig& cfg) {
    Rng rng(cfg.seed);
    return sample_targets(cfg, rng);
}

}  // namespace mtrp
