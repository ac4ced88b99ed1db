#include <algorithm>
#include <chrono>

#include "rollbreak/attacks.hpp"

namespace rollbreak {
namespace {

using Clock = std::chrono::steady_clock;

GF2Poly window_at(ByteView known, std::uint64_t end, std::uint32_t window) {
    if (end < window) throw std::invalid_argument("restic: clash window starts before the data");
    return rabin_window_poly(known.subspan(end - window, window));
}

std::uint64_t mod_small(const GF2Poly& a, const Poly64Mod& m) {
    const auto w = a.words();
    std::uint64_t r = 0;
    for (std::size_t i = w.size(); i-- > 0;) r = m.reduce(w[i], r);
    return r;
}

struct SiteWindows {
    std::vector<GF2Poly> polys;  // one per candidate end
};

SiteWindows windows_of(const ClashSite& s, const KnownMap& known, std::uint32_t window) {
    SiteWindows out;
    for (auto e : s.ends()) out.polys.push_back(window_at(known.at(s.archive_id), e, window));
    return out;
}

bool algebra_ok(const std::vector<SiteWindows>& sites, const Poly64Mod& m, std::uint64_t cmask) {
    for (const auto& s : sites) {
        bool any = false;
        for (const auto& a : s.polys) {
            if ((mod_small(a, m) & cmask) == 0) {
                any = true;
                break;
            }
        }
        if (!any) return false;
    }
    return true;
}

RabinParams make_params(const ScaleProfile& prof, std::uint64_t poly) {
    RabinParams r;
    r.poly = GF2Poly::from_u64(poly);
    r.window_bytes = prof.rabin_window;
    r.mask_bits = prof.mask_bits;
    r.min_chunk = prof.min_chunk;
    r.max_chunk = prof.max_chunk;
    return r;
}

AttackReport start_report(const char* name, const KnownInput& in, const AttackOptions& opt) {
    AttackReport rep;
    rep.attack = name;
    rep.scheme = Scheme::restic;
    rep.profile = in.prof.name;
    rep.shard = opt.shard;
    if (in.prof.rabin_degree > 63 || in.prof.rabin_degree <= in.prof.mask_bits)
        throw std::invalid_argument("restic attacks need mask_bits < degree <= 63");
    return rep;
}

void set_winner(AttackReport& rep, const ScaleProfile& prof) {
    if (rep.accepted.empty()) return;
    rep.success = true;
    rep.winner = rep.accepted.front().index;
    rep.params = make_params(prof, std::stoull(rep.accepted.front().candidate.substr(2), nullptr, 16));
}

}  // namespace

AttackReport attack_restic_solve(const KnownInput& in, const AttackOptions& opt) {
    const auto t0 = Clock::now();
    AttackReport rep = start_report("restic-solve", in, opt);
    auto done = [&] {
        rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        return rep;
    };
    if (in.compressor != "identity") {
        rep.diagnostic = "restic-solve needs exact clash offsets and does not work with compression";
        return done();
    }
    const unsigned D = in.prof.rabin_degree;
    const unsigned m = in.prof.mask_bits;
    const std::uint32_t win = in.prof.rabin_window;
    const unsigned top = 8 * win - 1;
    const std::size_t need = top + 1 - D;
    rep.set_extra("clashes_required", std::to_string(need));

    std::vector<const ClashSite*> sites;
    for (const auto& s : in.sites) {
        if (s.exact()) sites.push_back(&s);
    }
    if (sites.size() < need + 1) {
        rep.diagnostic = "insufficient clashes: need " + std::to_string(need + 1) + " exact clash sites";
        return done();
    }
    std::vector<GF2Poly> polys;
    for (auto* s : sites) polys.push_back(window_at(in.known.at(s->archive_id), s->spans[0].end, win));

    // Cancel degrees top..D+1 across a working set of clashes; on a combination
    // whose degree drops below D, swap the last clash for the next unused one.
    std::vector<std::size_t> use(need);
    for (std::size_t i = 0; i < need; ++i) use[i] = i;
    std::size_t next = need;
    std::optional<GF2Poly> aprime;
    std::size_t attempts = 0;
    while (!aprime) {
        ++attempts;
        GF2Matrix M(top - D, use.size());
        for (std::size_t j = 0; j < use.size(); ++j) {
            const auto& a = polys[use[j]];
            for (unsigned d = top; d > D; --d) {
                if (a.coeff(d)) M.set(top - d, j, true);
            }
        }
        const auto sol = gf2_solve(M, BitVector(M.n_rows()));
        for (const auto& k : sol.kernel) {
            GF2Poly comb;
            for (std::size_t j = 0; j < use.size(); ++j) {
                if (k.get(j)) comb += polys[use[j]];
            }
            if (comb.degree() == static_cast<int>(D)) {
                aprime = comb;
                break;
            }
        }
        if (aprime) break;
        if (next + 1 >= sites.size()) {
            rep.diagnostic = "degenerate elimination and no spare clashes left: supply more clashes";
            return done();
        }
        use.back() = next++;
    }
    rep.set_extra("elimination_attempts", std::to_string(attempts));
    rep.clashes_used = next;

    // Held-out clashes for the algebraic and simulated checks.
    std::vector<SiteWindows> checks;
    std::vector<ClashSite> sim;
    for (std::size_t i = next; i < sites.size() && checks.size() < 1 + opt.amplification; ++i) {
        checks.push_back({{polys[i]}});
        sim.push_back(*sites[i]);
    }
    rep.clashes_used += checks.size();
    const std::uint64_t known_low = aprime->low_word() & ring_mask(m);
    const std::uint64_t high = std::uint64_t{1} << D;
    const std::uint64_t cmask = ring_mask(m);
    rep.index_space = std::uint64_t{1} << (D - m);
    std::tie(rep.range_begin, rep.range_end) = shard_range(rep.index_space, opt.shard);

    auto kernel = [&](std::uint64_t b, std::uint64_t e, RangeResult& rr) {
        for (std::uint64_t idx = b; idx < e; ++idx) {
            ++rr.work;
            const std::uint64_t p = high | (idx << m) | known_low;
            if (!is_irreducible_u64(p)) continue;
            if (!algebra_ok(checks, Poly64Mod{p, static_cast<int>(D)}, cmask)) continue;
            if (clash_consistency_check(make_params(in.prof, p), sim, in.known)) {
                ++rr.passed;
                rr.accepted.push_back({idx, "P=" + GF2Poly::from_u64(p).to_hex()});
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
    set_winner(rep, in.prof);
    if (!rep.success) rep.diagnostic = "exhausted: no polynomial passed the checks";
    return done();
}

AttackReport attack_restic_gcd(const KnownInput& in, const AttackOptions& opt) {
    const auto t0 = Clock::now();
    AttackReport rep = start_report("restic-gcd", in, opt);
    const unsigned D = in.prof.rabin_degree;
    const unsigned m = in.prof.mask_bits;
    const std::uint32_t win = in.prof.rabin_window;
    if (in.sites.size() < 3) throw std::invalid_argument("restic-gcd needs 3 clash sites");
    const auto first = windows_of(in.sites[0], in.known, win);
    std::vector<SiteWindows> checks;
    std::vector<ClashSite> sim;
    for (std::size_t i = 1; i < in.sites.size() && i < 3 + opt.amplification; ++i) {
        checks.push_back(windows_of(in.sites[i], in.known, win));
        sim.push_back(in.sites[i]);
    }
    rep.clashes_used = 1 + checks.size();
    const std::uint64_t guesses = std::uint64_t{1} << (D - m);
    rep.index_space = first.polys.size() * guesses;
    std::tie(rep.range_begin, rep.range_end) = shard_range(rep.index_space, opt.shard);
    const std::uint64_t cmask = ring_mask(m);
    const GF2Poly x = GF2Poly::monomial(1);
    rep.set_extra("gcds_per_end", std::to_string(guesses));

    auto kernel = [&](std::uint64_t b, std::uint64_t e, RangeResult& rr) {
        for (std::uint64_t idx = b; idx < e; ++idx) {
            ++rr.work;
            GF2Poly f = first.polys[idx / guesses] + GF2Poly::from_u64((idx % guesses) << m);
            if (f.degree() < static_cast<int>(D)) continue;
            const GF2Poly g = poly_gcd(f, pow_x2d_mod(D, f) + x);
            if (g.degree() < static_cast<int>(D)) continue;
            const auto factors = irreducible_factors_of_degree(g, D);
            for (const auto& p : factors) {
                const std::uint64_t pv = p.low_word();
                if (!algebra_ok(checks, Poly64Mod{pv, static_cast<int>(D)}, cmask)) continue;
                if (clash_consistency_check(make_params(in.prof, pv), sim, in.known)) {
                    ++rr.passed;
                    rr.accepted.push_back({idx, "P=" + p.to_hex()});
                } else {
                    ++rr.failed;
                }
            }
        }
    };
    auto rr = run_range(rep.range_begin, rep.range_end, opt.jobs, kernel);
    rep.work = rr.work;
    rep.work_closed_form = rep.range_end - rep.range_begin;
    rep.checks_passed = rr.passed;
    rep.checks_failed = rr.failed;
    rep.accepted = rr.accepted;
    // Distinct guesses can reach the same polynomial; keep the first.
    std::vector<Accepted> uniq;
    for (const auto& a : rep.accepted) {
        if (std::none_of(uniq.begin(), uniq.end(), [&](const Accepted& u) { return u.candidate == a.candidate; }))
            uniq.push_back(a);
    }
    rep.accepted = std::move(uniq);
    set_winner(rep, in.prof);
    if (!rep.success) rep.diagnostic = "exhausted: no polynomial passed the checks";
    rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return rep;
}

GcdRarity measure_gcd_rarity(unsigned degree, std::uint64_t guesses, std::uint64_t seed) {
    if (degree < 2) throw std::invalid_argument("degree must be at least 2");
    Rng rng(derive_seed(seed, 0x6cd));
    GcdRarity out;
    out.guesses = guesses;
    out.expected_rate = 1.0 / (2.0 * degree * degree);
    const GF2Poly x = GF2Poly::monomial(1);
    const int d = static_cast<int>(degree);
    for (std::uint64_t i = 0; i < guesses; ++i) {
        std::vector<std::uint64_t> w(8);
        for (auto& v : w) v = rng();
        GF2Poly f(std::move(w));
        if (f.degree() < 1) continue;
        const GF2Poly g = poly_gcd(f, pow_x2d_mod(degree, f) + x);
        const int gd = g.degree();
        if (gd != 0 && gd != 1 && gd != d && gd != d + 1) ++out.outside_degree_set;
        if (gd >= 2 * d && irreducible_factors_of_degree(g, degree).size() >= 2) ++out.unexpected;
    }
    return out;
}

}  // namespace rollbreak
