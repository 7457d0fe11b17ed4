#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mtrp/channel.hpp"
#include "mtrp/fusion.hpp"
#include "mtrp/geometry.hpp"
#include "mtrp/receiver.hpp"
#include "mtrp/scenario.hpp"
#include "mtrp/waveform.hpp"

namespace mtrp {

struct DeploymentSection {
    int n_sites = 7;
    double isd_m = 500.0;
    double trp_height_m = 25.0;
    double boresight_offset_deg = 0.0;
    double downtilt_deg = 0.0;
    ArrayConfig array;

    bool operator==(const DeploymentSection&) const = default;
};

struct ScenarioSection {
    int n_targets = 5;
    double region_radius_m = 500.0;
    double region_half_width_deg = 60.0;
    double min_separation_m = 10.0;
    double altitude_min_m = 25.0;
    double altitude_max_m = 300.0;
    double max_speed_mps = 50.0;
    RcsModel rcs;

    bool operator==(const ScenarioSection&) const = default;
};

struct ChannelSection {
    TargetMultipath multipath;
    ClutterConfig clutter;
    double cull_threshold_db = 40.0;
    bool noise_enabled = true;

    bool operator==(const ChannelSection&) const = default;
};

enum class SelectionMode { fixed, automatic };

struct FusionSection {
    double d_3d_m = 20.0;
    int serving_trp = 1;
    /// TRP whose line of sight defines the reported radial velocity.
    int center_trp = 1;
    SelectionMode mode = SelectionMode::fixed;
    std::vector<int> trps{1, 5, 9, 13};
    SelectionConfig selection;
    int pilot_drops = 10;

    bool operator==(const FusionSection&) const = default;
};

struct MetricsSection {
    double association_radius_m = 20.0;
    double percentile_level = 0.9;
    bool exclude_rank_deficient = false;

    bool operator==(const MetricsSection&) const = default;
};

struct OverheadSection {
    /// Sensing symbols each assisting TRP occupies per slot.
    int symbols_per_trp = 1;

    bool operator==(const OverheadSection&) const = default;
};

struct CampaignSection {
    int n_drops = 400;
    int workers = 0;  ///< 0 = OpenMP default
    std::vector<int> vth{1, 2, 3, 4};
    std::vector<int> k_strongest{3};
    /// Empty sweeps fall back to waveform.tx_power_dbm / deployment.array.d_v.
    std::vector<double> tx_power_dbm;
    std::vector<double> d_v;
    std::vector<double> t_refresh_s{0.128, 1.0};
    /// Also score every selected TRP on its own.
    bool per_trp = true;

    bool operator==(const CampaignSection&) const = default;
};

struct OutputSection {
    std::string directory = "results";
    bool dump_paths = false;
    bool dump_maps = false;

    bool operator==(const OutputSection&) const = default;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    DeploymentSection deployment;
    PrsConfig waveform;
    ChannelSection channel;
    ReceiverConfig receiver;
    ScenarioSection scenario;
    FusionSection fusion;
    MetricsSection metrics;
    OverheadSection overhead;
    CampaignSection campaign;
    OutputSection output;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigValidationError naming the first offending field.
void validate(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::filesystem::path& path);
/// Parses YAML text; unknown keys are rejected (a top-level `run` block is
/// ignored so manifests load back).
ExperimentConfig parse_config(const std::string& yaml_text);
/// Fully resolved configuration as YAML. `parse_config(to_yaml(c)) == c`.
std::string to_yaml(const ExperimentConfig& cfg);

std::string to_string(SelectionMode mode);

/// Sweep values with empty lists replaced by the base setting.
std::vector<double> tx_power_sweep(const ExperimentConfig& cfg);
std::vector<double> d_v_sweep(const ExperimentConfig& cfg);

}  // namespace mtrp
