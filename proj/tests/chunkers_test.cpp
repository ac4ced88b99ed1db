#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "rollbreak/leakage.hpp"
#include "support.hpp"

using namespace rbtest;

namespace {

std::vector<Bytes> inputs(std::uint64_t seed) {
    std::vector<Bytes> v;
    v.push_back(random_bytes(300000, seed));
    v.push_back(Bytes(100000, 0));
    v.push_back(gen_two_valued_plaintext(0, 7, 200000, seed));
    std::vector<std::uint8_t> acgt{'A', 'C', 'G', 'T'};
    v.push_back(gen_small_alphabet(acgt, 200000, seed));
    Bytes periodic(150000);
    for (std::size_t i = 0; i < periodic.size(); ++i) periodic[i] = static_cast<std::uint8_t>(i % 251);
    v.push_back(periodic);
    v.push_back(Bytes{});
    v.push_back(Bytes{42});
    return v;
}

ChunkerParams params_for(Scheme s, std::string_view prof, std::uint64_t seed) { return keygen(s, seed, profile(prof)); }

}  // namespace

TEST_CASE("chunkers agree with the reference rules on random and adversarial input") {
    for (auto s : {Scheme::tarsnap, Scheme::borg, Scheme::restic}) {
        for (std::string_view prof : {"tiny", "desk"}) {
            const auto p = params_for(s, prof, 5);
            for (const auto& data : inputs(9)) {
                const auto got = chunk(p, data);
                CAPTURE(to_string(s));
                CAPTURE(prof);
                CAPTURE(data.size());
                CHECK(verify_tiling(p, data.size(), got) == "");
                CHECK(verify_clashes(p, data, got) == "");
                CHECK(got == ref_chunk(p, data));
            }
        }
    }
}

TEST_CASE("streaming in arbitrary pieces equals one-shot chunking") {
    Rng rng(3);
    const auto data = random_bytes(400000, 4);
    for (auto s : {Scheme::tarsnap, Scheme::borg, Scheme::restic}) {
        const auto p = params_for(s, "tiny", 6);
        const auto whole = chunk(p, data);
        auto c = make_chunker(p);
        std::vector<ChunkRecord> got;
        std::size_t pos = 0;
        while (pos < data.size()) {
            const std::size_t n = std::min<std::size_t>(data.size() - pos, uniform_below(rng, 5000));
            c->feed(ByteView(data).subspan(pos, n));
            pos += n;
            for (auto& r : c->drain()) got.push_back(r);
        }
        for (auto& r : c->finish()) got.push_back(r);
        CHECK(got == whole);
        CHECK(chunk(p, data) == whole);
    }
}

TEST_CASE("next_boundary reproduces each chunk from its start") {
    const auto data = random_bytes(200000, 8);
    for (auto s : {Scheme::tarsnap, Scheme::borg, Scheme::restic}) {
        const auto p = params_for(s, "tiny", 7);
        for (const auto& r : chunk(p, data)) {
            auto nb = next_boundary(p, data, r.start);
            REQUIRE(nb);
            CHECK(*nb == r);
        }
        auto first = chunk(p, data).front();
        CHECK_FALSE(next_boundary(p, data, 0, first.end - 1).has_value());
    }
}

TEST_CASE("hash primitives follow their definitions") {
    const auto p = std::get<BuzhashParams>(params_for(Scheme::borg, "desk", 1));
    const auto data = random_bytes(10000, 2);
    for (std::uint64_t e : {4095u, 5000u, 9999u}) {
        CHECK(buzhash(ByteView(data).subspan(e - 4095, 4095), p.table, p.width) == ref_buzhash_at(p, data, e));
    }
    const auto r = std::get<RabinParams>(params_for(Scheme::restic, "desk", 1));
    for (std::uint64_t e : {64u, 1000u, 9999u}) {
        CHECK(rabin_fingerprint(ByteView(data).subspan(e - 64, 64), r.poly) == ref_rabin_at(r, data, e));
    }
    Bytes one{0x80};
    CHECK(rabin_window_poly(one) == GF2Poly::monomial(7));
    Bytes two{0x01, 0x00};
    CHECK(rabin_window_poly(two) == GF2Poly::monomial(8));
    const auto t = std::get<TarsnapParams>(params_for(Scheme::tarsnap, "desk", 1));
    Bytes s{3, 9};
    const std::uint64_t a = t.alpha, want = (a * t.x[3] + a * a % t.p * t.x[9]) % t.p;
    CHECK(tarsnap_sum(s, t, 1) == want);
}

TEST_CASE("keygen is deterministic and satisfies the parameter invariants") {
    for (std::string_view prof : profile_names()) {
        for (auto s : {Scheme::tarsnap, Scheme::borg, Scheme::restic}) {
            const auto a = keygen(s, 7, profile(prof)), b = keygen(s, 7, profile(prof));
            CHECK(a == b);
            CHECK_NOTHROW(validate(a));
            CHECK(serialize_params(a, prof) == serialize_params(b, prof));
        }
        const auto t = tarsnap_keygen(3, profile(prof));
        CHECK(order_exceeds(t.alpha, t.p, t.max_chunk));
        const auto primes = canonical_primes(profile(prof).prime_bits);
        CHECK(std::find(primes.begin(), primes.end(), t.p) != primes.end());
        const auto r = restic_keygen(3, profile(prof));
        CHECK(is_irreducible(r.poly));
        CHECK(r.poly.degree() == static_cast<int>(profile(prof).rabin_degree));
    }
    CHECK(keygen(Scheme::borg, 1, profile("desk")) != keygen(Scheme::borg, 2, profile("desk")));
}

TEST_CASE("profiles carry the documented constants") {
    const auto& full = profile("full");
    CHECK(full.prime_bits == 24);
    CHECK(full.tarsnap_mu == 65536);
    CHECK(full.rabin_degree == 53);
    CHECK(full.buzhash_width == 32);
    CHECK(full.buzhash_window == 4095);
    CHECK(full.mask_bits == 21);
    CHECK(full.min_chunk == (1u << 19));
    CHECK(full.max_chunk == (1u << 23));
    const auto& desk = profile("desk");
    CHECK(desk.prime_bits == 16);
    CHECK(desk.tarsnap_mu == 1024);
    CHECK(desk.rabin_degree == 33);
    CHECK(desk.mask_bits == 12);
    CHECK(desk.min_chunk == (1u << 13));
    CHECK(desk.max_chunk == (1u << 17));
    CHECK_THROWS_AS(profile("huge"), std::invalid_argument);
}

TEST_CASE("canonical primes are the 17 largest below the bound") {
    for (unsigned bits : {10u, 16u, 24u}) {
        const auto primes = canonical_primes(bits);
        REQUIRE(primes.size() == 17);
        std::vector<std::uint32_t> want;
        for (std::uint32_t n = std::uint32_t{1} << bits; want.size() < 17; --n) {
            bool prime = n > 1;
            for (std::uint32_t d = 2; d * d <= n && prime; ++d) prime = n % d != 0;
            if (prime) want.push_back(n);
        }
        CHECK(primes == want);
    }
}

TEST_CASE("validation rejects broken parameters") {
    auto t = tarsnap_keygen(1, profile("tiny"));
    t.p = 1000;
    CHECK_THROWS_AS(validate(t), std::invalid_argument);
    auto t2 = tarsnap_keygen(1, profile("tiny"));
    t2.alpha = 1;
    CHECK_THROWS_AS(validate(t2), std::invalid_argument);
    auto b = borg_keygen(1, profile("tiny"));
    b.min_chunk = b.max_chunk;
    CHECK_THROWS_AS(validate(b), std::invalid_argument);
    auto b2 = borg_keygen(1, profile("tiny"));
    b2.table[5] = std::uint64_t{1} << 40;
    CHECK_THROWS_AS(validate(b2), std::invalid_argument);
    auto r = restic_keygen(1, profile("tiny"));
    r.window_bytes = 0;
    CHECK_THROWS_AS(validate(r), std::invalid_argument);
}

TEST_CASE("params and records text formats round-trip and reject garbage") {
    for (auto s : {Scheme::tarsnap, Scheme::borg, Scheme::restic}) {
        const auto p = params_for(s, "desk", 11);
        const auto text = serialize_params(p, "desk");
        const auto back = parse_params(text);
        CHECK(back.profile == "desk");
        CHECK(back.params == p);
        CHECK(serialize_params(back.params, "desk") == text);
        CHECK(params_fingerprint(p) == params_fingerprint(back.params));
        const auto data = random_bytes(50000, 12);
        const auto recs = chunk(p, data);
        std::stringstream ss;
        write_records(ss, s, "desk", params_fingerprint(p), recs);
        const auto rf = read_records(ss);
        CHECK(rf.scheme == s);
        CHECK(rf.profile == "desk");
        CHECK(rf.records.size() == recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i) {
            CHECK(rf.records[i].start == recs[i].start);
            CHECK(rf.records[i].end == recs[i].end);
            CHECK(rf.records[i].cause == recs[i].cause);
        }
    }
    CHECK_THROWS_AS(parse_params("rollbreak-params v9\n"), FormatError);
    CHECK_THROWS_AS(parse_params("rollbreak-params v1\nscheme=borg\nprofile=desk\n"), FormatError);
    CHECK_THROWS_AS(parse_params(""), FormatError);
    std::stringstream bad("scheme=borg,profile=desk,params=00\n0,10,sideways\n");
    CHECK_THROWS_AS(read_records(bad), FormatError);
    CHECK(parse_cause("max-size") == Cause::max_size);
    CHECK(to_string(Cause::end_of_data) == "end-of-data");
}
