#pragma once
// Small shared helpers: seeded randomness and digests.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace rollbreak {

using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection; the sequence depends only on the
/// engine output, unlike std::uniform_int_distribution.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
        std::uint64_t v = rng();
        if (v < limit) return v % n;
    }
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Derives an independent stream seed from a base seed and a label.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label);

using Digest = std::array<std::uint8_t, 32>;
Digest sha256(std::span<const std::uint8_t> data);
std::string to_hex(std::span<const std::uint8_t> data);

}  // namespace rollbreak
