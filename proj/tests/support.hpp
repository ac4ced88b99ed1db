#pragma once
// Scenario builders shared by the tests and the acceptance runner.

#include <map>

#include "rollbreak/attacks.hpp"
#include "rollbreak/pipeline.hpp"
#include "rollbreak/util.hpp"

namespace rbtest {

using namespace rollbreak;

inline Bytes random_bytes(std::uint64_t n, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x7e57));
    Bytes out(n);
    std::size_t i = 0;
    while (i < n) {
        auto v = rng();
        for (int k = 0; k < 8 && i < n; ++k, v >>= 8) out[i++] = static_cast<std::uint8_t>(v);
    }
    return out;
}

struct Scenario {
    ObservationLog log;
    std::map<std::uint64_t, Bytes> files;
    std::map<std::uint64_t, std::vector<ChunkRecord>> truth;

    KnownMap known() const {
        KnownMap k;
        for (const auto& [id, f] : files) k[id] = ByteView(f);
        return k;
    }

    void add(const ChunkerParams& params, std::uint64_t id, Bytes data, const ObserveOptions& opts = {}) {
        auto& f = files[id] = std::move(data);
        truth[id] = observe_archive(log, params, compression_model(log.compressor), f, id, opts);
    }
};

inline Scenario make_scenario(const ChunkerParams& params, std::string_view profile_name, std::string_view compressor) {
    Scenario s;
    s.log.scheme = scheme_of(params);
    s.log.profile = std::string(profile_name);
    s.log.compressor = std::string(compressor);
    return s;
}

/// One two-valued file over {0, v} per value, archive id = v.
inline Scenario two_valued(const ChunkerParams& params, std::string_view profile_name, std::string_view compressor,
                           const std::vector<std::uint8_t>& values, std::uint64_t length, std::uint64_t seed) {
    auto s = make_scenario(params, profile_name, compressor);
    for (auto v : values) s.add(params, v, gen_two_valued_plaintext(0, v, length, derive_seed(seed, v)));
    return s;
}

/// `count` random files, archive ids 0..count-1.
inline Scenario random_files(const ChunkerParams& params, std::string_view profile_name, std::string_view compressor,
                             std::size_t count, std::uint64_t length, std::uint64_t seed) {
    auto s = make_scenario(params, profile_name, compressor);
    for (std::size_t i = 0; i < count; ++i) s.add(params, i, random_bytes(length, derive_seed(seed, i)));
    return s;
}

/// x_rec[i] * x_true[v] == x_rec[v] * x_true[i] mod p for every listed i.
inline bool tarsnap_equal_up_to_scaling(const TarsnapParams& rec, const TarsnapParams& truth,
                                        const std::vector<std::uint8_t>& bytes) {
    if (rec.p != truth.p || rec.alpha != truth.alpha) return false;
    const std::uint64_t p = truth.p;
    for (auto i : bytes) {
        for (auto j : bytes) {
            if (std::uint64_t{rec.x[i]} * truth.x[j] % p != std::uint64_t{rec.x[j]} * truth.x[i] % p) return false;
        }
    }
    return true;
}

/// Boundaries of `data` under both parameter sets coincide.
inline bool same_boundaries(const ChunkerParams& a, const ChunkerParams& b, ByteView data) {
    auto ra = chunk(a, data), rb = chunk(b, data);
    if (ra.size() != rb.size()) return false;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        if (ra[i].end != rb[i].end || ra[i].cause != rb[i].cause) return false;
    }
    return true;
}

}  // namespace rbtest
