#pragma once

#include <filesystem>
#include <string>

#include "mtrp/engine.hpp"

namespace mtrp {

/// Writes manifest.yaml, summary.json, summary.csv, overhead.csv, drops.csv,
/// pairs.csv, fused.csv, cdf.csv, per_trp.csv, failures.csv and, when
/// enabled, paths.csv and maps/*.bin. Throws Error naming the path on I/O
/// failure.
void emit_results(const CampaignResult& result, const std::filesystem::path& directory);

/// Run manifest: a `run` block (version, seed, selection, timing) followed by
/// the resolved configuration. Loads back through load_config.
std::string manifest_yaml(const CampaignResult& result);

/// Header of summary.csv.
inline constexpr const char* kSummaryColumns =
    "vth,k_strongest,tx_power,d_v,t_refresh,n_drops,n_failed,mdp,fap,h90,v90,vel90,eta_cpi,eta_eff";

std::string version_string();

}  // namespace mtrp
