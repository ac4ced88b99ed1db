#include <openssl/sha.h>

#include "rollbreak/util.hpp"

namespace rollbreak {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
    // splitmix64 finalizer over the combined input
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (label + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Digest sha256(std::span<const std::uint8_t> data) {
    Digest d{};
    SHA256(data.data(), data.size(), d.data());
    return d;
}

std::string to_hex(std::span<const std::uint8_t> data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 2);
    for (auto b : data) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 0xF]);
    }
    return s;
}

}  // namespace rollbreak
