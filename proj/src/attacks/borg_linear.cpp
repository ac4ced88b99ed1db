#include <algorithm>
#include <chrono>

#include "rollbreak/attacks.hpp"

namespace rollbreak {
namespace {

using Clock = std::chrono::steady_clock;

// cnt[b] bit r = parity of #{k < N : byte at end-1-k is b, k = r mod W}.
std::array<std::uint64_t, 256> window_parities(ByteView known, std::uint64_t end, std::uint32_t window,
                                               unsigned width) {
    std::array<std::uint64_t, 256> cnt{};
    unsigned r = 0;
    for (std::uint32_t k = 0; k < window; ++k) {
        cnt[known[end - 1 - k]] ^= std::uint64_t{1} << r;
        if (++r == width) r = 0;
    }
    return cnt;
}

// Low mask bits of the hash at `end` for the table encoded by v (bit b*W+j = bit j of T[b]).
std::uint64_t hash_image(const std::array<std::uint64_t, 256>& cnt, const BitVector& v, unsigned width,
                         unsigned mask_bits) {
    std::uint64_t out = 0;
    for (unsigned t = 0; t < mask_bits; ++t) {
        unsigned parity = 0;
        for (unsigned b = 0; b < 256; ++b) {
            const std::uint64_t c = cnt[b];
            if (!c) continue;
            for (unsigned r = 0; r < width; ++r) {
                if ((c >> r) & 1u) parity ^= v.get(b * width + (t + width - r) % width);
            }
        }
        if (parity & 1u) out |= std::uint64_t{1} << t;
    }
    return out;
}

BitVector table_vector(const std::array<std::uint64_t, 256>& table, unsigned width) {
    BitVector v(256 * width);
    for (unsigned b = 0; b < 256; ++b) {
        for (unsigned j = 0; j < width; ++j) v.set(b * width + j, (table[b] >> j) & 1u);
    }
    return v;
}

std::array<std::uint64_t, 256> vector_table(const BitVector& v, unsigned width) {
    std::array<std::uint64_t, 256> t{};
    for (unsigned b = 0; b < 256; ++b) {
        for (unsigned j = 0; j < width; ++j) {
            if (v.get(b * width + j)) t[b] |= std::uint64_t{1} << j;
        }
    }
    return t;
}

// Incremental rank tracker over GF(2) vectors.
class Span2 {
public:
    bool add(BitVector v) {
        for (const auto& [piv, row] : rows_) {
            if (v.get(piv)) v ^= row;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v.get(i)) {
                for (auto& [piv, row] : rows_) {
                    if (row.get(i)) row ^= v;
                }
                rows_.emplace_back(i, std::move(v));
                return true;
            }
        }
        return false;
    }

private:
    std::vector<std::pair<std::size_t, BitVector>> rows_;
};

}  // namespace

AttackReport attack_borg_linear(const KnownInput& in, const AttackOptions& opt) {
    const auto t0 = Clock::now();
    AttackReport rep;
    rep.attack = "borg-linear";
    rep.scheme = Scheme::borg;
    rep.profile = in.prof.name;
    rep.shard = opt.shard;
    auto done = [&] {
        rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        return rep;
    };
    if (in.compressor != "identity") {
        rep.diagnostic =
            "borg-linear will not work if compression is enabled: compressed lengths do not fix the clash offsets";
        return done();
    }
    const unsigned W = in.prof.buzhash_width;
    const unsigned m = in.prof.mask_bits;
    const std::uint32_t N = in.prof.buzhash_window;
    const std::size_t nvars = 256 * W;

    std::vector<ClashSite> sites;
    for (const auto& s : in.sites) {
        if (s.exact()) sites.push_back(s);
    }
    const std::size_t needed = nvars / m + 1;
    rep.set_extra("unknowns", std::to_string(nvars));
    rep.set_extra("clashes_required", std::to_string(needed + 1));
    if (sites.size() < 2) {
        rep.diagnostic = "insufficient clashes: need at least 2 exact clash sites";
        return done();
    }
    std::size_t hold = 1;
    if (sites.size() > needed) hold = std::max<std::size_t>(1, std::min<std::size_t>(opt.amplification, sites.size() - needed));
    const std::size_t used = sites.size() - hold;
    rep.clashes_used = sites.size();

    GF2Matrix M(used * m, nvars);
    for (std::size_t s = 0; s < used; ++s) {
        const auto& sp = sites[s].spans[0];
        const auto cnt = window_parities(in.known.at(sites[s].archive_id), sp.end, N, W);
        for (unsigned t = 0; t < m; ++t) {
            const std::size_t row = s * m + t;
            for (unsigned b = 0; b < 256; ++b) {
                for (unsigned r = 0; r < W; ++r) {
                    if ((cnt[b] >> r) & 1u) M.flip(row, b * W + (t + W - r) % W);
                }
            }
        }
    }
    const auto sol = gf2_solve(M, BitVector(M.n_rows()));
    rep.set_extra("rank", std::to_string(sol.rank));
    rep.set_extra("kernel_dim", std::to_string(sol.kernel.size()));
    if (!sol.consistent) {
        rep.diagnostic = "inconsistent system: a clash was misclassified";
        return done();
    }

    // Tables T[b] = c for all b with low mask bits of U*c zero preserve every boundary.
    const RingElem U = ring_geometric_sum(N, W);
    Span2 span;
    std::size_t cdim = 0;
    GF2Matrix cm(m, W);
    for (unsigned j = 0; j < W; ++j) {
        const auto img = ring_mul(U, RingElem{std::uint64_t{1} << j, W}).value;
        for (unsigned t = 0; t < m; ++t) {
            if ((img >> t) & 1u) cm.set(t, j, true);
        }
    }
    const auto csol = gf2_solve(cm, BitVector(m));
    for (const auto& c : csol.kernel) {
        std::array<std::uint64_t, 256> t{};
        std::uint64_t cv = 0;
        for (unsigned j = 0; j < W; ++j) {
            if (c.get(j)) cv |= std::uint64_t{1} << j;
        }
        t.fill(cv);
        if (span.add(table_vector(t, W))) ++cdim;
    }
    std::vector<BitVector> basis;
    for (const auto& k : sol.kernel) {
        if (span.add(k)) basis.push_back(k);
    }
    rep.set_extra("equivalence_class_dim", std::to_string(cdim));
    rep.set_extra("quotient_dim", std::to_string(basis.size()));
    if (basis.size() > 16) {
        rep.diagnostic = "insufficient rank: supply more clashes";
        return done();
    }

    std::vector<ClashSite> held(sites.begin() + static_cast<std::ptrdiff_t>(used), sites.end());
    std::vector<std::array<std::uint64_t, 256>> held_cnt;
    for (const auto& s : held) held_cnt.push_back(window_parities(in.known.at(s.archive_id), s.spans[0].end, N, W));
    std::vector<std::vector<std::uint64_t>> images(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (const auto& c : held_cnt) images[i].push_back(hash_image(c, basis[i], W, m));
    }

    rep.index_space = std::uint64_t{1} << basis.size();
    std::tie(rep.range_begin, rep.range_end) = shard_range(rep.index_space, opt.shard);
    auto make_params = [&](std::uint64_t idx) {
        BitVector v = sol.particular;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if ((idx >> i) & 1u) v ^= basis[i];
        }
        BuzhashParams p;
        p.table = vector_table(v, W);
        p.width = W;
        p.window = N;
        p.mask_bits = m;
        p.min_chunk = in.prof.min_chunk;
        p.max_chunk = in.prof.max_chunk;
        return p;
    };
    auto kernel = [&](std::uint64_t b, std::uint64_t e, RangeResult& rr) {
        for (std::uint64_t idx = b; idx < e; ++idx) {
            ++rr.work;
            bool zero = true;
            for (std::size_t h = 0; h < held.size() && zero; ++h) {
                std::uint64_t acc = 0;
                for (std::size_t i = 0; i < basis.size(); ++i) {
                    if ((idx >> i) & 1u) acc ^= images[i][h];
                }
                zero = acc == 0;
            }
            if (!zero) continue;
            if (clash_consistency_check(make_params(idx), held, in.known)) {
                ++rr.passed;
                rr.accepted.push_back({idx, "combination=" + std::to_string(idx)});
            } else {
                ++rr.failed;
            }
        }
    };
    auto rr = run_range(rep.range_begin, rep.range_end, opt.jobs, kernel);
    rep.work = rr.work;
    rep.work_closed_form = rep.range_end - rep.range_begin;
    rep.checks_passed = rr.passed;
    rep.checks_failed = rr.failed;
    rep.accepted = rr.accepted;
    if (!rep.accepted.empty()) {
        rep.success = true;
        rep.winner = rep.accepted.front().index;
        rep.params = make_params(*rep.winner);
    } else {
        rep.diagnostic = "exhausted: no solution passed the held-out consistency check";
    }
    return done();
}

}  // namespace rollbreak
