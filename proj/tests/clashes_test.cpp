#include "doctest.h"
#include "rollbreak/leakage.hpp"
#include "support.hpp"

using namespace rbtest;

namespace {

const ChunkRecord& truth_at(const Scenario& sc, const ClashSite& s) { return sc.truth.at(s.archive_id).at(s.index); }

}  // namespace

TEST_CASE("identity extraction recovers exactly the clash chunks") {
    for (auto s : {Scheme::tarsnap, Scheme::borg, Scheme::restic}) {
        const auto p = keygen(s, 4, profile("tiny"));
        auto sc = random_files(p, "tiny", "identity", 3, 60000, 7);
        auto in = make_known_input(sc.log, sc.known(), profile("tiny"));
        std::size_t clashes = 0;
        for (const auto& [id, recs] : sc.truth) {
            for (const auto& r : recs) clashes += r.cause == Cause::clash;
        }
        CHECK(in.sites.size() == clashes);
        for (const auto& site : in.sites) {
            REQUIRE(site.exact());
            const auto& t = truth_at(sc, site);
            CHECK(t.cause == Cause::clash);
            CHECK(site.spans[0] == Span{t.start, t.end});
            CHECK(site.scheme == s);
        }
    }
}

TEST_CASE("compressed extraction keeps the true interpretation of every site") {
    for (auto s : {Scheme::tarsnap, Scheme::borg, Scheme::restic}) {
        const auto p = keygen(s, 5, profile("tiny"));
        auto sc = make_scenario(p, "tiny", "toy-rle");
        sc.add(p, 0, gen_two_valued_plaintext(0, 3, 40000, 1));
        sc.add(p, 1, random_bytes(40000, 2));
        std::vector<std::uint8_t> acgt{'A', 'C', 'G', 'T'};
        sc.add(p, 2, gen_small_alphabet(acgt, 40000, 3));
        for (std::uint64_t id = 0; id < 3; ++id) {
            auto ex = extract_clashes(sc.log, id, sc.files[id], compression_model("toy-rle"), limits_of(p));
            CHECK(ex.consistent);
            CHECK(ex.chunks == sc.truth[id].size());
            CHECK_FALSE(ex.sites.empty());
            for (const auto& site : ex.sites) {
                const auto& t = truth_at(sc, site);
                CHECK(t.cause == Cause::clash);
                CHECK(std::find(site.spans.begin(), site.spans.end(), Span{t.start, t.end}) != site.spans.end());
                CHECK(site_consistent(p, site, sc.files[id]));
            }
        }
    }
}

TEST_CASE("a log that the plaintext cannot explain is a format error") {
    const auto p = keygen(Scheme::borg, 1, profile("tiny"));
    auto sc = random_files(p, "tiny", "identity", 1, 30000, 1);
    sc.log.records[3].clen += 1;
    auto ex = extract_clashes(sc.log, 0, sc.files[0], compression_model("identity"), limits_of(p));
    CHECK_FALSE(ex.consistent);
    CHECK_FALSE(ex.diagnostic.empty());
    CHECK_THROWS_AS(make_known_input(sc.log, sc.known(), profile("tiny")), FormatError);
}

TEST_CASE("two-valued inputs are grouped by their nonzero byte") {
    const auto p = keygen(Scheme::tarsnap, 2, profile("tiny"));
    std::vector<std::uint8_t> vals{1, 5, 200};
    auto sc = two_valued(p, "tiny", "identity", vals, 8000, 3);
    auto in = make_two_valued_input(sc.log, sc.known(), profile("tiny"));
    REQUIRE(in.sites.size() == 3);
    for (auto v : vals) CHECK_FALSE(in.sites.at(v).empty());
    auto bad = make_scenario(p, "tiny", "identity");
    bad.add(p, 0, random_bytes(8000, 1));
    CHECK_THROWS_AS(make_two_valued_input(bad.log, bad.known(), profile("tiny")), std::invalid_argument);
}

TEST_CASE("two-valued plaintexts use only their two values, about evenly") {
    const auto d = gen_two_valued_plaintext(0, 9, 100000, 4);
    CHECK(d == gen_two_valued_plaintext(0, 9, 100000, 4));
    std::size_t nines = 0;
    for (auto b : d) {
        CHECK((b == 0 || b == 9));
        nines += b == 9;
    }
    CHECK(nines > 49000);
    CHECK(nines < 51000);
}

TEST_CASE("consistency check accepts the truth and rejects random parameters") {
    for (auto s : {Scheme::tarsnap, Scheme::borg, Scheme::restic}) {
        const auto p = keygen(s, 6, profile("tiny"));
        auto sc = random_files(p, "tiny", "identity", 2, 40000, 8);
        auto in = make_known_input(sc.log, sc.known(), profile("tiny"));
        REQUIRE(in.sites.size() >= 3);
        CHECK(clash_consistency_check(p, in.sites, in.known));
        std::span<const ClashSite> three(in.sites.data(), 3);
        int accepted = 0;
        for (std::uint64_t k = 0; k < 200; ++k) accepted += clash_consistency_check(keygen(s, 1000 + k, profile("tiny")), three, in.known);
        CHECK(accepted == 0);
    }
}

TEST_CASE("shard ranges tile the index space") {
    CHECK(parse_shard("3/8").index == 3);
    CHECK(parse_shard("3/8").total == 8);
    CHECK_THROWS_AS(parse_shard("8/8"), std::invalid_argument);
    CHECK_THROWS_AS(parse_shard("x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_shard("1/0"), std::invalid_argument);
    for (std::uint64_t n : {0ull, 1ull, 5ull, 1000ull, 123457ull}) {
        for (std::uint32_t total : {1u, 2u, 7u, 16u}) {
            std::uint64_t pos = 0;
            for (std::uint32_t i = 0; i < total; ++i) {
                auto [b, e] = shard_range(n, {i, total});
                CHECK(b == pos);
                CHECK(e >= b);
                CHECK(e - b <= n / total + 1);
                pos = e;
            }
            CHECK(pos == n);
        }
    }
}

TEST_CASE("run_range gives the same result for any thread count") {
    auto kernel = [](std::uint64_t b, std::uint64_t e, RangeResult& r) {
        for (auto i = b; i < e; ++i) {
            ++r.work;
            if (i % 97 == 5) {
                ++r.passed;
                r.accepted.push_back({i, std::to_string(i * i)});
            } else {
                ++r.failed;
            }
        }
    };
    auto one = run_range(10, 100000, 1, kernel);
    for (unsigned jobs : {2u, 3u, 8u}) {
        auto many = run_range(10, 100000, jobs, kernel);
        CHECK(many.work == one.work);
        CHECK(many.passed == one.passed);
        CHECK(many.failed == one.failed);
        CHECK(many.accepted == one.accepted);
    }
}
