#pragma once

// Small configurations and independent oracles shared by the test programs.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "mtrp/config.hpp"

namespace mtrp::test {

/// A reduced radio setup that runs a drop in well under a second: 20 MHz,
/// 32 occasions, 2x2 arrays.
inline ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.seed = 11;
    c.deployment.array.n_rows = 2;
    c.deployment.array.n_cols = 2;
    c.waveform.bandwidth_hz = 20e6;
    c.waveform.occasions_per_cpi = 32;
    c.receiver.range_doppler.range_fft_size = 512;
    c.receiver.angle_grid.step_deg = 2.0;
    c.campaign.n_drops = 3;
    c.campaign.vth = {1, 2};
    c.campaign.t_refresh_s = {0.032};
    c.campaign.workers = 1;
    c.fusion.pilot_drops = 2;
    return c;
}

inline std::filesystem::path source_dir() {
    const char* s = std::getenv("MTRP_SOURCE_DIR");
    return s ? std::filesystem::path(s) : std::filesystem::current_path();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("mtrp_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Size of a maximum-cardinality matching in a bipartite graph (augmenting paths).
inline int max_matching(const std::vector<std::vector<bool>>& adj) {
    const std::size_t nl = adj.size();
    const std::size_t nr = nl ? adj[0].size() : 0;
    std::vector<int> match_r(nr, -1);
    int size = 0;
    for (std::size_t u = 0; u < nl; ++u) {
        std::vector<bool> seen(nr, false);
        auto augment = [&](auto&& self, std::size_t v) -> bool {
            for (std::size_t w = 0; w < nr; ++w) {
                if (!adj[v][w] || seen[w]) continue;
                seen[w] = true;
                if (match_r[w] < 0 || self(self, static_cast<std::size_t>(match_r[w]))) {
                    match_r[w] = static_cast<int>(v);
                    return true;
                }
            }
            return false;
        };
        if (augment(augment, u)) ++size;
    }
    return size;
}

}  // namespace mtrp::test
