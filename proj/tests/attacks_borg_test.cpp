#include "doctest.h"
#include "support.hpp"

using namespace rbtest;

namespace {

const std::vector<std::uint8_t> kValues{1, 2, 3, 4, 5, 6, 7, 8};

}  // namespace

TEST_CASE("a clash is a ring relation in the two table entries") {
    const auto& prof = profile("tiny");
    const auto truth = borg_keygen(3, prof);
    const unsigned W = truth.width;
    const std::uint64_t cmask = (std::uint64_t{1} << truth.mask_bits) - 1;
    const RingElem U = ring_geometric_sum(truth.window, W);
    for (std::uint8_t v : {1, 9, 200}) {
        const auto data = gen_two_valued_plaintext(0, v, 50000, v);
        const RingElem t0{truth.table[0], W}, tv{truth.table[v], W};
        std::size_t clashes = 0;
        for (std::uint64_t e = truth.window; e <= data.size(); e += 7) {
            const auto q = borg_window_q(data, e, truth.window, W, v);
            const auto h = ring_add(ring_mul(U, t0), ring_mul(q, ring_add(t0, tv)));
            CHECK(h.value == buzhash(ByteView(data).subspan(e - truth.window, truth.window), truth.table, W));
        }
        for (const auto& r : chunk(truth, data)) {
            if (r.cause != Cause::clash) continue;
            ++clashes;
            const auto q = borg_window_q(data, r.end, truth.window, W, v);
            CHECK((ring_add(ring_mul(U, t0), ring_mul(q, ring_add(t0, tv))).value & cmask) == 0);
        }
        CHECK(clashes > 10);
    }
    CHECK_THROWS_AS(borg_window_q(Bytes(10), 5, 255, 16, 1), std::invalid_argument);
}

TEST_CASE("borg-linear recovers a table that chunks like the secret one") {
    const auto& prof = profile("tiny");
    const auto truth = borg_keygen(7, prof);
    auto sc = random_files(truth, "tiny", "identity", 2, 1u << 19, 4);
    auto in = make_known_input(sc.log, sc.known(), prof);
    auto rep = attack_borg_linear(in);
    REQUIRE(rep.success);
    CHECK(rep.work == rep.work_closed_form);
    CHECK(rep.get_extra("unknowns") == std::to_string(256 * prof.buzhash_width));
    CHECK(rep.index_space == std::uint64_t{1} << std::stoull(*rep.get_extra("quotient_dim")));
    CHECK(same_boundaries(*rep.params, truth, random_bytes(1u << 20, 77)));
    CHECK(same_boundaries(*rep.params, truth, gen_two_valued_plaintext(0, 5, 200000, 78)));
    for (const auto& a : rep.accepted) CHECK(a.candidate == "combination=" + std::to_string(a.index));
}

TEST_CASE("borg-linear refuses compressed observations and too few clashes") {
    const auto& prof = profile("tiny");
    const auto truth = borg_keygen(7, prof);
    auto sc = random_files(truth, "tiny", "toy-rle", 1, 100000, 4);
    auto in = make_known_input(sc.log, sc.known(), prof);
    auto rep = attack_borg_linear(in);
    CHECK_FALSE(rep.success);
    CHECK(rep.diagnostic.find("will not work if compression is enabled") != std::string::npos);

    auto few = random_files(truth, "tiny", "identity", 1, 100000, 4);
    auto fin = make_known_input(few.log, few.known(), prof);
    auto frep = attack_borg_linear(fin);
    CHECK_FALSE(frep.success);
    CHECK_FALSE(frep.diagnostic.empty());
    fin.sites.resize(1);
    CHECK(attack_borg_linear(fin).diagnostic.find("insufficient clashes") == 0);
}

TEST_CASE("borg-poly recovers the attacked table entries under both compressors") {
    const auto& prof = profile("tiny");
    for (std::string_view comp : {"identity", "toy-rle"}) {
        const auto truth = borg_keygen(4, prof);
        auto sc = two_valued(truth, "tiny", comp, kValues, 16384, 21);
        auto in = make_two_valued_input(sc.log, sc.known(), prof);
        auto rep = attack_borg_poly(in);
        CAPTURE(comp);
        REQUIRE(rep.success);
        CHECK(rep.get_extra("residual_loop") == std::to_string(1u << (prof.buzhash_width - prof.mask_bits)));
        CHECK(rep.index_space % (1u << (prof.buzhash_width - prof.mask_bits)) == 0);
        CHECK(rep.work == rep.work_closed_form);
        for (auto v : kValues) CHECK(same_boundaries(*rep.params, truth, gen_two_valued_plaintext(0, v, 65536, 500 + v)));
    }
}

TEST_CASE("borg-poly rejects unusable input") {
    const auto& prof = profile("tiny");
    TwoValuedInput empty;
    empty.prof = prof;
    CHECK_THROWS_AS(attack_borg_poly(empty), std::invalid_argument);
    const auto truth = borg_keygen(4, prof);
    auto sc = two_valued(truth, "tiny", "identity", {1, 2}, 16384, 21);
    auto in = make_two_valued_input(sc.log, sc.known(), prof);
    in.sites.begin()->second.resize(3);
    CHECK_THROWS_AS(attack_borg_poly(in), std::invalid_argument);
}

TEST_CASE("a random wrong table passes one clash at about the mask rate") {
    const auto& prof = profile("desk");
    const auto truth = borg_keygen(2, prof);
    auto sc = random_files(truth, "desk", "identity", 1, 1u << 20, 5);
    auto in = make_known_input(sc.log, sc.known(), prof);
    REQUIRE_FALSE(in.sites.empty());
    const auto site = *std::min_element(in.sites.begin(), in.sites.end(), [](const auto& a, const auto& b) {
        return a.spans[0].length() < b.spans[0].length();
    });
    const double q = std::ldexp(1.0, -static_cast<int>(truth.mask_bits));
    const double want = q * std::pow(1 - q, static_cast<double>(site.spans[0].length() - prof.min_chunk));
    const std::uint64_t tables = 100000;
    std::uint64_t accepted = 0;
    for (std::uint64_t k = 0; k < tables; ++k) accepted += site_consistent(borg_keygen(10000 + k, prof), site, in.known.at(site.archive_id));
    const double mean = want * static_cast<double>(tables);
    CAPTURE(accepted);
    CAPTURE(mean);
    CHECK(static_cast<double>(accepted) > 0.4 * mean);
    CHECK(static_cast<double>(accepted) < 2.2 * mean);
}
