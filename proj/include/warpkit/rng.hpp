#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace warpkit {

// Deterministic random helpers. std::uniform_*_distribution output is
// implementation-defined, so all transforms from raw engine output are done
// here by hand; mt19937_64 itself is fully specified by the standard.

inline double uniform_double(std::mt19937_64& rng, double lo, double hi) {
    // 53 random bits -> [0,1) with exact dyadic spacing.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    // Modulo bias is irrelevant here (n << 2^64); determinism is what matters.
    return rng() % n;
}

template <typename T>
void shuffle_deterministic(std::vector<T>& items, std::mt19937_64& rng) {
    // Hand-rolled Fisher-Yates; std::shuffle is implementation-defined.
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace warpkit
