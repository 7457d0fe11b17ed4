#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mtrp/fusion.hpp"
#include "mtrp/scenario.hpp"

namespace mtrp {

struct TruthPair {
    std::size_t fused = 0;
    std::size_t truth = 0;
    double distance_m = 0.0;
};

struct Association {
    std::vector<TruthPair> pairs;
    std::vector<std::size_t> missed;  ///< truth indices
    std::vector<std::size_t> ghosts;  ///< fused indices
};

/// Greedy nearest-pair matching on 3D distance (ties: lower truth, then lower
/// fused index). Pairs farther than `radius_m` are never formed.
Association associate_truth(std::span<const Position3D> fused, std::span<const Position3D> truths, double radius_m);

struct PairError {
    std::size_t truth = 0;
    std::size_t fused = 0;
    double horizontal_m = 0.0;
    double vertical_m = 0.0;
    double velocity_mps = 0.0;  ///< |v_r,center estimate - truth projected on the center LOS|
    bool rank_deficient = false;
};

struct DropScore {
    int n_truth = 0;
    int n_missed = 0;
    int n_reported = 0;
    int n_ghost = 0;
    std::vector<PairError> errors;
};

DropScore score_drop(std::span<const FusedTarget> fused, std::span<const TargetTruth> truths,
                     const TrpConfig& center_trp, double radius_m);

/// Mean of missed/truth over drops with at least one truth.
std::optional<double> compute_mdp(std::span<const DropScore> drops);
/// Mean of ghost/reported over drops with at least one report.
std::optional<double> compute_fap(std::span<const DropScore> drops);

/// Linear interpolation between order statistics at q (n - 1), q in [0, 1].
std::optional<double> percentile(std::vector<double> samples, double q);

struct ErrorSamples {
    std::vector<double> horizontal_m;
    std::vector<double> vertical_m;
    std::vector<double> velocity_mps;
};

ErrorSamples collect_errors(std::span<const DropScore> drops, bool exclude_rank_deficient = false);

struct CampaignScore {
    std::optional<double> mdp;
    std::optional<double> fap;
    ErrorSamples samples;
    std::optional<double> h90;
    std::optional<double> v90;
    std::optional<double> vel90;
};

CampaignScore aggregate(std::span<const DropScore> drops, bool exclude_rank_deficient = false,
                        double level = 0.9);

/// Sorted samples against cumulative probability (i + 1) / n.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples);

}  // namespace mtrp
