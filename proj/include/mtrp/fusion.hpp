#pragma once

#include <span>
#include <vector>

#include "mtrp/common.hpp"
#include "mtrp/geometry.hpp"
#include "mtrp/receiver.hpp"

namespace mtrp {

// ---- TRP selection -------------------------------------------------------

struct TrpCandidate {
    int trp_id = 0;
    double detection_rate = 0.0;  ///< fraction of recent CPIs with a detection
    double mean_snr = 0.0;        ///< linear
    double azimuth_deg = 0.0;     ///< global azimuth from the TRP to the target region
};

struct SelectionConfig {
    int max_count = 4;
    double snr_threshold_db = 0.0;
    double min_detection_rate = 0.9;
    /// Always retained when present among the candidates. 0 disables.
    int serving_trp_id = 1;

    bool operator==(const SelectionConfig&) const = default;
};

/// Filters by SNR and detection rate, then grows the set greedily by the
/// largest minimum azimuth separation to already chosen TRPs (ties: higher
/// detection rate, then lower id). Returned ids are sorted ascending.
std::vector<int> select_trps(std::span<const TrpCandidate> candidates, const SelectionConfig& cfg);

// ---- Association ---------------------------------------------------------

struct Cluster {
    std::vector<std::size_t> member_indices;  ///< into the clustered measurement list
    std::vector<Measurement> members;
    Position3D centroid = Position3D::Zero();
    double snr_sum = 0.0;

    std::vector<int> distinct_trps() const;
};

/// Greedy gating in order of decreasing SNR (ties by trp_id, then position).
/// A measurement joins the nearest cluster whose centroid is within `d_3d`
/// and whose updated SNR-weighted centroid still has every member within
/// `d_3d`; failing that the next nearest is tried, else it seeds a new one.
std::vector<Cluster> cluster_detections(std::span<const Measurement> measurements, double d_3d);

bool vote(const Cluster& cluster, int v_th);

/// SNR-weighted mean of member positions.
Position3D fuse_position(const Cluster& cluster);

struct VelocityMember {
    Vec3 direction;  ///< unit LOS from the TRP toward the fused position
    double v_r = 0.0;
    double gamma = 0.0;
};

struct VelocityEstimate {
    Vec3 velocity = Vec3::Zero();
    int rank = 0;
    bool rank_deficient = true;
    int n_used = 0;
};

/// Minimum-norm least squares on the k strongest members.
VelocityEstimate reconstruct_velocity(std::span<const VelocityMember> members, int k_strongest);

double center_radial(const Vec3& velocity, const TrpConfig& center_trp, const Position3D& fused_position);

// ---- Fused output --------------------------------------------------------

struct FusionConfig {
    double d_3d_m = 20.0;
    int vth = 2;
    int k_strongest = 3;

    bool operator==(const FusionConfig&) const = default;
};

struct FusedTarget {
    Position3D position = Position3D::Zero();
    Vec3 velocity = Vec3::Zero();
    double v_r_center = 0.0;
    std::vector<int> contributing_trps;
    double total_snr = 0.0;
    bool rank_deficient = false;
    std::size_t n_members = 0;
};

/// Position, velocity and center projection for one cluster. Velocity uses the
/// strongest member of each TRP so a TRP never contributes two rows.
FusedTarget fuse_cluster(const Cluster& cluster, std::span<const TrpConfig> trps, const TrpConfig& center_trp,
                         int k_strongest);

/// Clusters that pass the vote, fused.
std::vector<FusedTarget> fuse_measurements(std::span<const Measurement> measurements, std::span<const TrpConfig> trps,
                                           const TrpConfig& center_trp, const FusionConfig& cfg);

}  // namespace mtrp
