#include <stdexcept>
#include <string>

#include "rollbreak/chunkers.hpp"

namespace rollbreak {
namespace {

// Desk and tiny shrink the key sizes and chunk-size scales so every attack
// loop is executable; width and window of the Buzhash stay at production
// values in desk so the ring algebra is the real one.
const ScaleProfile kProfiles[] = {
    {"full", 24, 1u << 16, 261120, 53, 64, 32, 4095, 21, std::uint64_t{1} << 19, std::uint64_t{1} << 23},
    {"desk", 16, 1u << 10, 4080, 33, 64, 32, 4095, 12, std::uint64_t{1} << 13, std::uint64_t{1} << 17},
    {"tiny", 10, 1u << 6, 255, 17, 64, 16, 255, 8, std::uint64_t{1} << 8, std::uint64_t{1} << 12},
};

}  // namespace

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::tarsnap: return "tarsnap";
        case Scheme::borg: return "borg";
        case Scheme::restic: return "restic";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "tarsnap") return Scheme::tarsnap;
    if (name == "borg") return Scheme::borg;
    if (name == "restic") return Scheme::restic;
    throw std::invalid_argument("unknown scheme: " + std::string(name));
}

std::string_view to_string(Cause c) {
    switch (c) {
        case Cause::clash: return "clash";
        case Cause::max_size: return "max-size";
        case Cause::end_of_data: return "end-of-data";
    }
    return "?";
}

Cause parse_cause(std::string_view s) {
    if (s == "clash") return Cause::clash;
    if (s == "max-size") return Cause::max_size;
    if (s == "end-of-data") return Cause::end_of_data;
    throw FormatError("unknown chunk cause: " + std::string(s));
}

const ScaleProfile& profile(std::string_view name) {
    for (const auto& p : kProfiles) {
        if (p.name == name) return p;
    }
    throw std::invalid_argument("unknown profile: " + std::string(name));
}

std::vector<std::string_view> profile_names() {
    std::vector<std::string_view> out;
    for (const auto& p : kProfiles) out.emplace_back(p.name);
    return out;
}

bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint32_t d = 3; static_cast<std::uint64_t>(d) * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

std::vector<std::uint32_t> canonical_primes(unsigned bits) {
    if (bits < 6 || bits > 31) throw std::invalid_argument("prime_bits must be in [6, 31]");
    std::vector<std::uint32_t> out;
    for (std::uint32_t n = std::uint32_t{1} << bits; out.size() < 17; --n) {
        if (is_prime_u32(n)) out.push_back(n);
    }
    return out;
}

}  // namespace rollbreak
