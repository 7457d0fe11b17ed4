#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mtrp {

using Rng = std::mt19937_64;

/// Substream tags. Each random quantity in a drop draws from its own stream so
/// toggling one feature (e.g. clutter) leaves every other draw unchanged.
enum class Stream : std::uint64_t {
    drop = 1,
    targets = 2,
    target_paths = 3,
    clutter = 4,
    prs_symbols = 5,
    noise = 6,
    pilot = 7,
};

/// Deterministic seed derivation through std::seed_seq (portable by definition).
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags);

inline std::uint64_t derive_seed(std::uint64_t parent, Stream tag, std::uint64_t index = 0) {
    return derive_seed(parent, {static_cast<std::uint64_t>(tag), index});
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace mtrp
