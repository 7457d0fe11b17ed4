#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mtrp/config.hpp"
#include "mtrp/metrics.hpp"

namespace mtrp {

/// Settings that change the radio observations. Everything else in a sweep
/// point is evaluated on the same observations (common random numbers).
struct PhyPoint {
    double tx_power_dbm = 52.0;
    double d_v = 0.5;

    bool operator==(const PhyPoint&) const = default;
};

struct SweepPoint {
    int vth = 2;
    int k_strongest = 3;
    double tx_power_dbm = 52.0;
    double d_v = 0.5;
    double t_refresh_s = 0.128;

    PhyPoint phy() const { return {tx_power_dbm, d_v}; }
};

/// Cartesian product in the order vth, k_strongest, tx_power, d_v, t_refresh
/// (last axis fastest).
std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg);

struct TrpObservation {
    int trp_id = 0;
    std::vector<Detection> detections;  ///< snapshots stripped
    std::vector<Measurement> measurements;
    std::optional<RangeDopplerMap> map;
};

struct TracedPath {
    int trp_id = 0;
    PathComponent path;
    bool doppler_aliased = false;  ///< |Doppler| beyond the unambiguous limit
};

struct DropObservation {
    std::size_t drop_index = 0;
    std::uint64_t seed = 0;
    std::vector<TargetTruth> truths;
    std::vector<TrpObservation> trps;
    std::vector<TracedPath> paths;  ///< only when tracing
};

/// Runs the radio part of a drop (targets, channels, receiver chains) for a
/// fixed set of TRPs.
class DropSimulator {
public:
    DropSimulator(const ExperimentConfig& cfg, const PhyPoint& phy, std::vector<int> trp_ids);

    /// Deterministic in (cfg.seed, drop_index).
    DropObservation observe(std::size_t drop_index, bool trace_paths = false, bool keep_maps = false) const;
    /// Same, from an explicit drop seed.
    DropObservation observe_seeded(std::uint64_t drop_seed, bool trace_paths = false, bool keep_maps = false) const;

    const std::vector<TrpConfig>& deployment() const { return deployment_; }
    const std::vector<int>& trp_ids() const { return trp_ids_; }
    const TrpConfig& center() const;
    const PrsConfig& waveform() const { return prs_; }
    DropConfig drop_config() const;

private:
    ExperimentConfig cfg_;
    PrsConfig prs_;
    std::vector<TrpConfig> deployment_;
    std::vector<int> trp_ids_;
    PrsGrid grid_;
    TrpReceiver receiver_;
};

std::uint64_t drop_seed(std::uint64_t base_seed, std::size_t drop_index);

/// Multi-TRP fusion of one drop's observations.
std::vector<FusedTarget> fuse_observation(const DropObservation& obs, const DropSimulator& sim,
                                          const FusionConfig& fusion);

/// One TRP alone: its own clusters, vth = 1, velocity and radial projection on
/// its own line of sight.
DropScore score_single_trp(const DropObservation& obs, const DropSimulator& sim, int trp_id,
                           const ExperimentConfig& cfg);

struct DropResult {
    DropObservation observation;
    std::vector<FusedTarget> fused;
    DropScore score;
};

/// One drop at the first value of every sweep axis.
DropResult run_drop(std::size_t drop_index, const ExperimentConfig& cfg);

struct SweepResult {
    SweepPoint point;
    CampaignScore score;
    int n_drops = 0;
    int n_failed = 0;
    OverheadReport overhead;
    std::vector<std::optional<DropScore>> drops;  ///< indexed by drop, empty when the cell failed
    std::vector<std::vector<FusedTarget>> fused;
};

struct PerTrpResult {
    PhyPoint phy;
    int trp_id = 0;
    CampaignScore score;
    int n_drops = 0;
};

struct CellFailure {
    std::size_t drop_index = 0;
    std::string stage;
    std::string message;
};

struct CampaignResult {
    ExperimentConfig config;
    std::vector<int> selected_trps;
    std::vector<TrpCandidate> candidates;  ///< filled by automatic selection
    std::vector<SweepResult> sweeps;
    std::vector<PerTrpResult> per_trp;
    std::vector<OverheadReport> overhead;  ///< one per refresh interval
    std::vector<CellFailure> failures;
    std::vector<DropObservation> traces;   ///< first PHY point, when dumps are enabled
    double elapsed_s = 0.0;
};

/// Pilot drops over every TRP facing the target region, then select_trps.
std::vector<int> select_assisting_trps(const ExperimentConfig& cfg, std::vector<TrpCandidate>* candidates = nullptr);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

CampaignResult run_campaign(const ExperimentConfig& cfg, const ProgressFn& progress = {});

}  // namespace mtrp
