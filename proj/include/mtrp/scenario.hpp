#pragma once

#include <cstdint>
#include <vector>

#include "mtrp/common.hpp"
#include "mtrp/rng.hpp"

namespace mtrp {

/// Ground-truth UAV state for one drop. Velocity is horizontal (v_z = 0).
struct TargetTruth {
    Position3D position = Position3D::Zero();
    Vec3 velocity = Vec3::Zero();
    double rcs_dbsm = 0.0;
};

/// Log-normal RCS: mean in dBsm plus a Gaussian fluctuation in the dB domain.
struct RcsModel {
    double mean_dbsm = -12.81;
    double fluctuation_std_db = 3.74;

    bool operator==(const RcsModel&) const = default;
};

/// Horizontal wedge of a sector: apex at the serving TRP's ground projection,
/// centered on its boresight.
struct SectorRegion {
    Vec3 apex = Vec3::Zero();
    double boresight_deg = 30.0;
    double half_width_deg = 60.0;
    double radius_m = 500.0;
};

struct DropConfig {
    int n_targets = 5;
    SectorRegion sector;
    double min_separation_m = 10.0;
    double altitude_min_m = 25.0;
    double altitude_max_m = 300.0;
    double max_speed_mps = 50.0;
    RcsModel rcs;
    /// Points every target must clear by `min_separation_m` (TRP antennas).
    std::vector<Position3D> keep_out;
    std::uint64_t seed = 0;
};

/// Rejection cap per target before the region is declared too small.
inline constexpr int kMaxPlacementAttempts = 10'000;

std::vector<TargetTruth> sample_targets(const DropConfig& cfg, Rng& rng);

/// Same as above with a generator seeded from `cfg.seed`.
std::vector<TargetTruth> sample_targets(const DropConfig& cfg);

double sample_rcs(const RcsModel& model, Rng& rng);

}  // namespace mtrp
