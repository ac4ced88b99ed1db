#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rollbreak/leakage.hpp"
#include "support.hpp"

using namespace rbtest;

namespace {

double geometric_entropy_by_sum(double p) {
    double h = 0, q = 1;
    for (int k = 1; k < 100000000 && q > 1e-300; ++k) {
        const double pk = q * p;
        if (pk > 0) h -= pk * std::log2(pk);
        q *= 1 - p;
    }
    return h;
}

}  // namespace

TEST_CASE("plug-in entropy of small samples") {
    CHECK(chunk_size_entropy(std::vector<std::uint64_t>{5, 5, 5}) == doctest::Approx(0));
    CHECK(chunk_size_entropy(std::vector<std::uint64_t>{1, 1, 2, 2}) == doctest::Approx(1));
    CHECK(chunk_size_entropy(std::vector<std::uint64_t>{1, 2, 3, 4}) == doctest::Approx(2));
    CHECK(chunk_size_entropy(std::vector<std::uint64_t>{7, 7, 7, 9}) ==
          doctest::Approx(-(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25))));
    CHECK(chunk_size_entropy(std::vector<std::uint64_t>{}) == doctest::Approx(0));
}

TEST_CASE("geometric entropy equals its defining sum") {
    for (double p : {0.5, 0.1, 1.0 / 64, 1.0 / 4096, 1.0 / 65536}) {
        CAPTURE(p);
        CHECK(geometric_entropy(p) == doctest::Approx(geometric_entropy_by_sum(p)).epsilon(1e-9));
    }
    CHECK(geometric_entropy(0.5) == doctest::Approx(2));
}

TEST_CASE("generic chunking matches the geometric prediction") {
    GenericChunkModel m;
    m.ring_size = std::uint64_t{1} << 32;
    m.clash_size = std::uint64_t{1} << 20;
    m.max_chunk = std::uint64_t{1} << 40;
    const double p = m.clash_probability();
    auto lens = generic_chunk(m, 300000ull * 4096, 3);
    std::uint64_t total = 0;
    for (auto l : lens) total += l;
    CHECK(total == 300000ull * 4096);
    lens.pop_back();
    double mean = static_cast<double>(total) / static_cast<double>(lens.size());
    CHECK(mean == doctest::Approx(1 / p).epsilon(0.01));
    CHECK(std::abs(chunk_size_entropy(lens) - geometric_entropy(p)) < 0.5);
    CHECK(generic_chunk(m, 100000, 9) == generic_chunk(m, 100000, 9));

    GenericChunkModel bad = m;
    bad.clash_size = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = m;
    bad.min_chunk = bad.max_chunk;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("content-driven generic chunking has the model's clash rate") {
    GenericChunkModel m;
    m.ring_size = 1 << 16;
    m.clash_size = 1 << 8;
    m.max_chunk = 1 << 20;
    const auto data = random_bytes(4u << 20, 5);
    const auto recs = generic_chunk_content(m, 11, data);
    CHECK(static_cast<double>(recs.size()) == doctest::Approx(data.size() / 256.0).epsilon(0.05));
    CHECK(recs == generic_chunk_content(m, 11, data));
    CHECK(recs != generic_chunk_content(m, 12, data));
}

TEST_CASE("leakage rate: documented value, scale invariance and monotonicity") {
    CHECK(leakage_rate(16, 65536) == std::ldexp(1.0, -15));
    CHECK(leakage_rate(10, 1000) == doctest::Approx(leakage_rate(20, 2000)));
    CHECK(leakage_rate(10, 1000) < leakage_rate(11, 1000));
    CHECK(leakage_rate(10, 1000) > leakage_rate(10, 1001));
    CHECK_THROWS_AS(leakage_rate(1, 0), std::invalid_argument);
}

TEST_CASE("fingerprinting: no false negatives, shared prefixes collide, CSV round trip") {
    const auto p = keygen(Scheme::borg, 3, profile("tiny"));
    auto sc = make_scenario(p, "tiny", "toy-rle");
    for (std::uint64_t id = 0; id < 200; ++id) sc.add(p, id, random_bytes(20000 + 37 * id, 100 + id));
    const auto shared = random_bytes(16384, 1);
    for (std::uint64_t id : {200, 201}) {
        auto f = shared;
        const auto tail = random_bytes(10000, id);
        f.insert(f.end(), tail.begin(), tail.end());
        sc.add(p, id, f);
    }
    const auto idx = fingerprint_build(sc.log, 2);
    for (auto id : sc.log.archive_ids()) {
        std::vector<std::uint64_t> obs;
        for (const auto& r : sc.log.archive(id)) obs.push_back(r.clen);
        const auto hits = fingerprint_match(idx, obs);
        CHECK(std::find(hits.begin(), hits.end(), id) != hits.end());
    }
    std::vector<std::uint64_t> obs200;
    for (const auto& r : sc.log.archive(200)) obs200.push_back(r.clen);
    CHECK(fingerprint_match(idx, obs200) == std::vector<std::uint64_t>{200, 201});
    CHECK(fingerprint_match(idx, std::vector<std::uint64_t>{1, 2}).empty());
    const auto st = fingerprint_stats(idx);
    CHECK(st.files == 202);
    CHECK(st.singleton_files == 200);
    CHECK(st.singleton_fraction() == doctest::Approx(200.0 / 202));

    std::stringstream ss;
    write_fingerprint_csv(ss, idx);
    auto back = read_fingerprint_csv(ss);
    CHECK(back.depth == idx.depth);
    CHECK(back.keys == idx.keys);
    std::stringstream bad1("lengths\n");
    CHECK_THROWS_AS(read_fingerprint_csv(bad1), FormatError);
    std::stringstream bad2("lengths,file\n1:2\n");
    CHECK_THROWS_AS(read_fingerprint_csv(bad2), FormatError);
    std::stringstream bad3("lengths,file\n1:x,3\n");
    CHECK_THROWS_AS(read_fingerprint_csv(bad3), FormatError);
    CHECK_THROWS_AS(fingerprint_build(sc.log, 0), std::invalid_argument);
}

TEST_CASE("variants: none, boundary-moving and compressed-only") {
    const auto p = keygen(Scheme::borg, 5, profile("tiny"));
    const auto& rle = compression_model("toy-rle");
    const auto& id = compression_model("identity");
    CHECK(variant_leak_assessment(random_bytes(5000, 1), {}, p, rle).variants.empty());

    // Slot inside a final chunk shorter than the minimum: boundaries cannot move.
    auto ref = random_bytes(20000, 2);
    const auto recs = chunk(p, ref);
    std::uint64_t last_clash = 0;
    for (const auto& r : recs) {
        if (r.cause == Cause::clash) last_clash = r.end;
    }
    REQUIRE(last_clash > 0);
    ref.resize(last_clash + 100);
    for (std::uint64_t i = last_clash + 40; i < last_clash + 49; ++i) ref[i] = 'A';
    std::vector<VariantSlot> slot{{last_clash + 44, {'A', 'B'}}};
    const auto r1 = variant_leak_assessment(ref, slot, p, rle);
    REQUIRE(r1.variants.size() == 1);
    CHECK_FALSE(r1.variants[0].boundaries_change);
    CHECK(r1.variants[0].compressed_only);
    CHECK(r1.variants[0].classes == 2);
    CHECK(r1.variants[0].bits == doctest::Approx(1));
    CHECK(r1.compressed_only == 1);
    const auto r2 = variant_leak_assessment(ref, slot, p, id);
    CHECK(r2.variants[0].classes == 1);
    CHECK(r2.leaked_bits == doctest::Approx(0));
    CHECK(r2.total_bits == doctest::Approx(1));

    // Slot just inside the window of a clash: some value moves the boundary.
    const auto big = random_bytes(20000, 3);
    std::uint64_t end = 0;
    for (const auto& r : chunk(p, big)) {
        if (r.cause == Cause::clash && r.end > 2000) {
            end = r.end;
            break;
        }
    }
    REQUIRE(end > 0);
    std::vector<VariantSlot> all{{end - 1, {}}};
    for (unsigned v = 0; v < 256; ++v) all[0].values.push_back(static_cast<std::uint8_t>(v));
    const auto r3 = variant_leak_assessment(big, all, p, id);
    CHECK(r3.variants[0].boundaries_change);
    CHECK(r3.boundary_changing == 1);
    CHECK(r3.variants[0].classes >= 2);
    CHECK(r3.leaked_bits > 0);
    CHECK(r3.leaked_bits <= r3.total_bits + 1e-9);
    CHECK(r3.total_bits == doctest::Approx(8));

    std::vector<VariantSlot> beyond{{big.size(), {1}}};
    CHECK_THROWS_AS(variant_leak_assessment(big, beyond, p, id), std::invalid_argument);
}

TEST_CASE("tuple histogram counts every value tuple once") {
    const auto p = keygen(Scheme::restic, 5, profile("tiny"));
    std::vector<std::uint8_t> acgt{'A', 'C', 'G', 'T'};
    auto ref = gen_small_alphabet(acgt, 6000, 4);
    for (std::size_t i = 3000; i < 3020; ++i) ref[i] = 'A';
    std::vector<std::uint64_t> offs{3005, 3008, 3011, 3014};
    const auto h = variant_tuple_histogram(ref, offs, acgt, p, compression_model("toy-rle"));
    std::uint64_t total = 0;
    for (const auto& [len, n] : h) total += n;
    CHECK(total == 256);
    CHECK(h.size() > 1);
    CHECK(std::is_sorted(h.begin(), h.end()));
    const auto hid = variant_tuple_histogram(ref, offs, acgt, p, compression_model("identity"));
    std::uint64_t tid = 0;
    for (const auto& [len, n] : hid) tid += n;
    CHECK(tid == 256);
    CHECK(variant_tuple_histogram(ref, {}, acgt, p, compression_model("identity")).empty());
}
