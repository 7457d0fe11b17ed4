#include "mtrp/rng.hpp"

#include <array>
#include <vector>

namespace mtrp {

std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * tags.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(parent);
    for (auto t : tags) push(t);
    std::seed_seq seq(words.begin(), words.end());
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace mtrp
