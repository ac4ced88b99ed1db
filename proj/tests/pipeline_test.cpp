#include <set>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace rbtest;

namespace {

Bytes runs_and_noise(std::uint64_t n, std::uint64_t seed) {
    Rng rng(seed);
    Bytes out;
    while (out.size() < n) {
        const auto b = static_cast<std::uint8_t>(rng() % 4 == 0 ? 0xFF : rng());
        const auto r = 1 + uniform_below(rng, rng() % 8 == 0 ? 700 : 6);
        out.insert(out.end(), std::min<std::uint64_t>(r, n - out.size()), b);
    }
    return out;
}

}  // namespace

TEST_CASE("toy-rle: documented encodings") {
    Bytes a(100, 0x41);
    CHECK(compress_toy_rle(a) == Bytes{0xFF, 0x64, 0x41});
    CHECK(compress_toy_rle(Bytes{1, 2, 3}) == Bytes{1, 2, 3});
    CHECK(compress_toy_rle(Bytes{}).empty());
    CHECK(compress_toy_rle(Bytes{0xFF}).size() == 3);
    CHECK(compress_toy_rle(Bytes(3, 9)) == Bytes{9, 9, 9});
    CHECK(compress_toy_rle(Bytes(4, 9)) == Bytes{0xFF, 4, 9});
    CHECK(compress_toy_rle(Bytes(256, 9)).size() == 4);
    CHECK_THROWS_AS(decompress_toy_rle(Bytes{0xFF, 3}), FormatError);
}

TEST_CASE("compression models: round trip, sizes and prefix sizes") {
    for (auto name : compression_model_names()) {
        const auto& m = compression_model(name);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto d = runs_and_noise(3000, seed);
            const auto c = m.compress(d);
            CHECK(m.decompress(c) == d);
            CHECK(m.compressed_size(d) == c.size());
            const auto ps = m.prefix_sizes(d);
            REQUIRE(ps.size() == d.size() + 1);
            for (std::size_t l = 0; l <= d.size(); l += 37) CHECK(ps[l] == m.compress(ByteView(d).first(l)).size());
            // Sizes never drop by more than the declared slack.
            std::uint64_t hi = 0;
            for (auto s : ps) {
                CHECK(s + m.prefix_slack() >= hi);
                hi = std::max(hi, s);
            }
        }
    }
    CHECK_THROWS_AS(compression_model("zstd"), std::invalid_argument);
}

TEST_CASE("matching_prefixes equals an exhaustive scan") {
    for (auto name : compression_model_names()) {
        const auto& m = compression_model(name);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto d = runs_and_noise(2000, 100 + seed);
            const auto ps = m.prefix_sizes(d);
            for (std::uint64_t clen : {1ull, 17ull, 300ull, 900ull, 1500ull}) {
                std::vector<std::uint64_t> want;
                for (std::uint64_t l = 50; l <= 1800; ++l) {
                    if (ps[l] == clen) want.push_back(l);
                }
                CHECK(m.matching_prefixes(d, clen, 50, 1800) == want);
                CHECK(enumerate_prefix_lengths(d, 0, clen, m, 50, 1800) == want);
            }
        }
    }
}

TEST_CASE("observation logs: content, round trip and malformed input") {
    const auto p = keygen(Scheme::restic, 3, profile("tiny"));
    auto sc = random_files(p, "tiny", "toy-rle", 3, 20000, 5);
    for (const auto& [id, recs] : sc.truth) {
        const auto obs = sc.log.archive(id);
        REQUIRE(obs.size() == recs.size());
        for (std::size_t i = 0; i < obs.size(); ++i) {
            CHECK(obs[i].index == i);
            CHECK(obs[i].clen ==
                  compress_toy_rle(ByteView(sc.files[id]).subspan(recs[i].start, recs[i].length())).size());
        }
    }
    CHECK(sc.log.archive_ids() == std::vector<std::uint64_t>{0, 1, 2});
    std::stringstream ss;
    write_observations(ss, sc.log);
    auto back = read_observations(ss);
    CHECK(back.records == sc.log.records);
    CHECK(back.scheme == Scheme::restic);
    CHECK(back.profile == "tiny");
    CHECK(back.compressor == "toy-rle");

    ObservationLog withu = make_scenario(p, "tiny", "identity").log;
    ObserveOptions opts;
    opts.record_ulen = true;
    observe_archive(withu, p, compression_model("identity"), sc.files[0], 0, opts);
    std::stringstream su;
    write_observations(su, withu);
    CHECK(read_observations(su).records == withu.records);
    CHECK(withu.records.front().ulen.has_value());

    std::stringstream bad1("nonsense\n0,0,1\n");
    CHECK_THROWS_AS(read_observations(bad1), FormatError);
    std::stringstream bad2("archive=a,scheme=borg,profile=desk,compressor=identity\n0,0\n");
    CHECK_THROWS_AS(read_observations(bad2), FormatError);
    std::stringstream bad3("archive=a,scheme=borg,profile=desk,compressor=identity\n0,x,5\n");
    CHECK_THROWS_AS(read_observations(bad3), FormatError);
}

TEST_CASE("encryption stub preserves length and is keyed") {
    const auto d = random_bytes(1000, 1);
    const auto e1 = encrypt_stub(d, 1, 0), e2 = encrypt_stub(d, 1, 0), e3 = encrypt_stub(d, 2, 0);
    CHECK(e1.size() == d.size());
    CHECK(e1 == e2);
    CHECK(e1 != e3);
    CHECK(e1 != d);
    CHECK(encrypt_stub(e1, 1, 0) == d);
}

TEST_CASE("traffic: segmentation and recovery") {
    const auto t = segment_requests(std::vector<std::uint64_t>{3000, 100, 2920}, 1460);
    CHECK(t.sizes == std::vector<std::uint32_t>{1460, 1460, 80, 100, 1460, 1460});
    auto rec = recover_request_sizes(t);
    REQUIRE(rec.size() == 3);
    CHECK(rec[0] == RecoveredRequest{3000, true, {}});
    CHECK(rec[1] == RecoveredRequest{100, true, {}});
    CHECK_FALSE(rec[2].exact);
    CHECK(rec[2].size == 2920);
    CHECK(rec[2].candidates == std::vector<std::uint64_t>{1460, 2920});

    Rng rng(4);
    for (int t2 = 0; t2 < 2000; ++t2) {
        std::vector<std::uint64_t> sizes(1 + uniform_below(rng, 20));
        for (auto& s : sizes) {
            do s = 1 + uniform_below(rng, 20000);
            while (s % 1460 == 0);
        }
        auto got = recover_request_sizes(segment_requests(sizes, 1460));
        REQUIRE(got.size() == sizes.size());
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            CHECK(got[i].size == sizes[i]);
            CHECK(got[i].exact);
        }
    }
    std::stringstream ss;
    write_trace(ss, t);
    auto back = read_trace(ss);
    CHECK(back.mss == 1460);
    CHECK(back.sizes == t.sizes);
    CHECK_THROWS_AS(segment_requests(std::vector<std::uint64_t>{0}, 1460), std::invalid_argument);
    std::stringstream bad("mss=abc\n");
    CHECK_THROWS_AS(read_trace(bad), FormatError);
}

TEST_CASE("dedup store counts only novel bytes") {
    Rng rng(5);
    std::vector<Bytes> pool;
    for (int i = 0; i < 20; ++i) pool.push_back(random_bytes(100 + uniform_below(rng, 500), 50 + i));
    DedupStore store;
    std::set<Bytes> seen;
    for (int t = 0; t < 200; ++t) {
        const auto& c = pool[uniform_below(rng, pool.size())];
        const bool fresh = seen.insert(c).second;
        CHECK(store.put(c) == (fresh ? c.size() : 0));
        CHECK(store.contains(c));
    }
    std::uint64_t total = 0;
    for (const auto& c : seen) total += c.size();
    CHECK(store.total() == total);
    CHECK(store.chunk_count() == seen.size());

    const auto p = keygen(Scheme::borg, 2, profile("tiny"));
    const auto data = random_bytes(50000, 6);
    DedupStore s2;
    CHECK(dedup_archive(s2, p, data) == data.size());
    CHECK(dedup_archive(s2, p, data) == 0);
}

TEST_CASE("dedup oracle finds the boundary that direct chunking produces") {
    for (auto s : {Scheme::tarsnap, Scheme::borg, Scheme::restic}) {
        const auto p = keygen(s, 3, profile("tiny"));
        Rng rng(derive_seed(7, static_cast<std::uint64_t>(s)));
        for (int t = 0; t < 8; ++t) {
            const auto x = random_bytes(1 + uniform_below(rng, min_clash_length(p) - 1), rng());
            const auto builder = random_bytes(max_chunk_of(p) + 10, rng());
            DedupStore store;
            store.put(x);
            const auto res = dedup_boundary_oracle(store, p, x, builder);
            std::optional<std::uint64_t> want;
            for (std::uint64_t l = 1; l <= max_chunk_of(p) && !want; ++l) {
                Bytes joined(builder.begin(), builder.begin() + static_cast<std::ptrdiff_t>(l));
                joined.insert(joined.end(), x.begin(), x.end());
                for (const auto& r : chunk(p, joined)) {
                    if (r.end == l) want = l;
                }
            }
            CHECK(res.boundary == want);
        }
        const auto long_x = random_bytes(min_clash_length(p), 1);
        CHECK_THROWS_AS(dedup_boundary_oracle(DedupStore{}, p, long_x, random_bytes(10, 2)), std::invalid_argument);
    }
}
