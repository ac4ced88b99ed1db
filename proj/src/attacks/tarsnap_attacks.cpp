#include <algorithm>
#include <chrono>
#include <cstdio>

#include "rollbreak/attacks.hpp"
#include "rollbreak/chunk_state.hpp"

namespace rollbreak {
namespace {

using Clock = std::chrono::steady_clock;

std::uint32_t mul(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p);
}

// A reusable simulator: the state keeps a pointer to `params`, which the
// search loops overwrite in place between candidates.
class TarsnapSim {
public:
    explicit TarsnapSim(const TarsnapParams& p) : params(p), state_(params) {}
    TarsnapSim(const TarsnapSim&) = delete;
    TarsnapSim& operator=(const TarsnapSim&) = delete;

    bool site_ok(const ClashSite& site, ByteView known) {
        std::size_t i = 0;
        while (i < site.spans.size()) {
            const std::uint64_t start = site.spans[i].start;
            std::size_t j = i;
            while (j < site.spans.size() && site.spans[j].start == start) ++j;
            const std::uint64_t last = site.spans[j - 1].end;
            state_.reset();
            for (std::uint64_t pos = start; pos < last; ++pos) {
                if (auto c = state_.push(known[pos])) {
                    if (*c == Cause::clash) {
                        for (std::size_t k = i; k < j; ++k) {
                            if (site.spans[k].end == pos + 1) return true;
                        }
                    }
                    break;
                }
            }
            i = j;
        }
        return false;
    }

    bool sites_ok(std::span<const ClashSite> sites, const KnownMap& known) {
        for (const auto& s : sites) {
            if (!site_ok(s, known.at(s.archive_id))) return false;
        }
        return true;
    }

    TarsnapParams params;

private:
    TarsnapState state_;
};

TarsnapParams base_params(const ScaleProfile& prof) {
    TarsnapParams t;
    t.mu = prof.tarsnap_mu;
    t.max_chunk = prof.tarsnap_max;
    return t;
}

// Candidate values of x[v] (with x[0] = 1) implied by each admissible clash
// length d at each interpretation of `site`. Adds the number of (span, d)
// pairs visited to `work`.
void ratio_candidates(const ClashSite& site, ByteView known, std::uint8_t v, std::uint32_t p, std::uint32_t alpha,
                      std::uint32_t mu, std::vector<std::uint32_t>& out, std::uint64_t& work,
                      std::vector<std::uint32_t>& s0s, std::vector<std::uint32_t>& svs) {
    out.clear();
    for (const auto& sp : site.spans) {
        const std::uint64_t dmax = tarsnap_d_count(sp.length(), mu);
        work += dmax;
        s0s.clear();
        svs.clear();
        std::uint32_t s0 = 0, sv = 0;
        for (std::uint64_t d = 1; d <= dmax; ++d) {
            const std::uint8_t b = known[sp.end - d];
            s0 = mul(s0, alpha, p);
            sv = mul(sv, alpha, p);
            if (b == 0) s0 = s0 + 1 == p ? 0 : s0 + 1;
            else if (b == v) sv = sv + 1 == p ? 0 : sv + 1;
            if (sv != 0) {
                s0s.push_back(s0);
                svs.push_back(sv);
            }
        }
        if (svs.empty()) continue;
        // Montgomery batch inversion of the denominators
        std::vector<std::uint32_t> prefix(svs.size());
        std::uint32_t acc = 1;
        for (std::size_t i = 0; i < svs.size(); ++i) {
            prefix[i] = acc;
            acc = mul(acc, svs[i], p);
        }
        std::uint32_t inv = powmod_u32(acc, p - 2, p);
        for (std::size_t i = svs.size(); i-- > 0;) {
            const std::uint32_t inv_i = mul(inv, prefix[i], p);
            inv = mul(inv, svs[i], p);
            const std::uint32_t ratio = mul(s0s[i], inv_i, p);
            out.push_back(ratio == 0 ? 0 : p - ratio);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

std::string encode(std::uint32_t p, std::uint32_t alpha, std::uint32_t x) {
    return "p=" + std::to_string(p) + ";alpha=" + std::to_string(alpha) + ";x=" + std::to_string(x);
}

void decode(const std::string& s, std::uint32_t& p, std::uint32_t& alpha, std::uint32_t& x) {
    if (std::sscanf(s.c_str(), "p=%u;alpha=%u;x=%u", &p, &alpha, &x) != 3)
        throw std::invalid_argument("bad tarsnap candidate: " + s);
}

struct Groups {
    std::uint8_t pivot = 0;
    std::vector<std::uint8_t> values;
};

Groups check_groups(const TwoValuedInput& in, std::size_t need) {
    Groups g;
    for (const auto& [v, sites] : in.sites) {
        if (v == 0) throw std::invalid_argument("byte value 0 is the normalization pivot and cannot be attacked");
        if (sites.size() < need)
            throw std::invalid_argument("byte value " + std::to_string(v) + " needs at least " +
                                        std::to_string(need) + " clashes");
        g.values.push_back(v);
    }
    if (g.values.empty()) throw std::invalid_argument("no clash sites supplied");
    g.pivot = g.values.front();
    return g;
}

std::span<const ClashSite> check_sites(const std::vector<ClashSite>& sites, std::size_t first, unsigned amp) {
    const std::size_t n = std::min<std::size_t>(sites.size(), first + amp);
    return std::span<const ClashSite>(sites).subspan(0, n);
}

void finish_report(AttackReport& rep, Clock::time_point t0) {
    rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

std::uint64_t tarsnap_d_count(std::uint64_t j, std::uint32_t mu) {
    if (j < 2) return 0;
    return std::min<std::uint64_t>(TarsnapState::window_at(j, mu), j - 1);
}

std::uint64_t tarsnap_clashes_closed_form(const TwoValuedInput& in, std::uint64_t begin, std::uint64_t end) {
    const auto& sites = in.sites.begin()->second;
    std::uint64_t per = 0;
    for (std::size_t s = 0; s < 2 && s < sites.size(); ++s) {
        for (const auto& sp : sites[s].spans) per += tarsnap_d_count(sp.length(), in.prof.tarsnap_mu);
    }
    return (end - begin) * per;
}

AttackReport attack_tarsnap_clashes(const TwoValuedInput& in, const AttackOptions& opt) {
    const auto t0 = Clock::now();
    AttackReport rep;
    rep.attack = "tarsnap-clashes";
    rep.scheme = Scheme::tarsnap;
    rep.profile = in.prof.name;
    rep.shard = opt.shard;
    const auto groups = check_groups(in, 2);
    const auto primes = canonical_primes(in.prof.prime_bits);
    std::vector<std::uint64_t> offset{0};
    for (auto p : primes) offset.push_back(offset.back() + (p - 2));
    rep.index_space = offset.back();
    std::tie(rep.range_begin, rep.range_end) = shard_range(rep.index_space, opt.shard);

    const std::uint8_t v = groups.pivot;
    const auto& sites = in.sites.at(v);
    const auto checks = check_sites(sites, 2, opt.amplification);
    const ByteView k1 = in.known.at(sites[0].archive_id), k2 = in.known.at(sites[1].archive_id);

    auto kernel = [&](std::uint64_t b, std::uint64_t e, RangeResult& rr) {
        TarsnapSim sim(base_params(in.prof));
        std::vector<std::uint32_t> a, c, s0, sv;
        std::size_t pi = std::upper_bound(offset.begin(), offset.end(), b) - offset.begin() - 1;
        for (std::uint64_t idx = b; idx < e; ++idx) {
            while (idx >= offset[pi + 1]) ++pi;
            const std::uint32_t p = primes[pi];
            const auto alpha = static_cast<std::uint32_t>(2 + (idx - offset[pi]));
            ratio_candidates(sites[0], k1, v, p, alpha, in.prof.tarsnap_mu, a, rr.work, s0, sv);
            ratio_candidates(sites[1], k2, v, p, alpha, in.prof.tarsnap_mu, c, rr.work, s0, sv);
            std::vector<std::uint32_t> both;
            std::set_intersection(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(both));
            for (auto x : both) {
                sim.params.p = p;
                sim.params.alpha = alpha;
                sim.params.x.fill(0);
                sim.params.x[0] = 1;
                sim.params.x[v] = x;
                if (sim.sites_ok(checks, in.known)) {
                    ++rr.passed;
                    rr.accepted.push_back({idx, encode(p, alpha, x)});
                } else {
                    ++rr.failed;
                }
            }
        }
    };
    auto rr = run_range(rep.range_begin, rep.range_end, opt.jobs, kernel);
    rep.work = rr.work;
    rep.work_closed_form = tarsnap_clashes_closed_form(in, rep.range_begin, rep.range_end);
    rep.checks_passed = rr.passed;
    rep.checks_failed = rr.failed;
    rep.accepted = rr.accepted;

    std::uint64_t per_clash = 0, spans = 0;
    for (std::size_t s = 0; s < 2; ++s) {
        for (const auto& sp : sites[s].spans) {
            per_clash += tarsnap_d_count(sp.length(), in.prof.tarsnap_mu);
            ++spans;
        }
    }
    rep.set_extra("d_candidates_per_clash", std::to_string(spans ? per_clash / spans : 0));

    // Per-byte follow-up with p and alpha fixed.
    for (const auto& acc : rep.accepted) {
        std::uint32_t p, alpha, x1;
        decode(acc.candidate, p, alpha, x1);
        TarsnapParams t = base_params(in.prof);
        t.p = p;
        t.alpha = alpha;
        t.x[0] = 1;
        t.x[v] = x1;
        std::uint64_t follow = 0;
        bool all = true;
        TarsnapSim sim(t);
        std::vector<std::uint32_t> cands, s0, sv;
        for (auto w : groups.values) {
            if (w == v) continue;
            const auto& ws = in.sites.at(w);
            const auto wchecks = check_sites(ws, 2, opt.amplification);
            ratio_candidates(ws[0], in.known.at(ws[0].archive_id), w, p, alpha, in.prof.tarsnap_mu, cands, follow,
                             s0, sv);
            bool found = false;
            for (auto x : cands) {
                sim.params.x[w] = x;
                if (sim.sites_ok(wchecks.subspan(1), in.known)) {
                    t.x[w] = x;
                    found = true;
                    break;
                }
            }
            sim.params.x[w] = t.x[w];
            if (!found) {
                all = false;
                break;
            }
        }
        if (all) {
            rep.winner = acc.index;
            rep.work_followup = follow;
            rep.params = t;
            rep.success = true;
            break;
        }
    }
    for (const auto& [w, s] : in.sites) rep.clashes_used += std::min<std::size_t>(s.size(), 2 + opt.amplification);
    if (!rep.success)
        rep.diagnostic = rep.accepted.empty() ? "exhausted: no (p, alpha, x) candidate survived"
                                              : "exhausted: no candidate extended to every byte value";
    finish_report(rep, t0);
    return rep;
}

AttackReport attack_tarsnap_naive(const TwoValuedInput& in, const AttackOptions& opt) {
    const auto t0 = Clock::now();
    AttackReport rep;
    rep.attack = "tarsnap-naive";
    rep.scheme = Scheme::tarsnap;
    rep.profile = in.prof.name;
    rep.shard = opt.shard;
    const auto groups = check_groups(in, 1);
    const auto primes = canonical_primes(in.prof.prime_bits);
    std::vector<std::uint64_t> offset{0};
    for (auto p : primes) offset.push_back(offset.back() + std::uint64_t{p - 2} * (p - 1));
    rep.index_space = offset.back();
    std::tie(rep.range_begin, rep.range_end) = shard_range(rep.index_space, opt.shard);
    const std::uint8_t v = groups.pivot;
    const auto& sites = in.sites.at(v);
    const auto checks = check_sites(sites, 1, opt.amplification);

    auto kernel = [&](std::uint64_t b, std::uint64_t e, RangeResult& rr) {
        TarsnapSim sim(base_params(in.prof));
        sim.params.x[0] = 1;
        std::size_t pi = std::upper_bound(offset.begin(), offset.end(), b) - offset.begin() - 1;
        for (std::uint64_t idx = b; idx < e; ++idx) {
            while (idx >= offset[pi + 1]) ++pi;
            const std::uint32_t p = primes[pi];
            const std::uint64_t local = idx - offset[pi];
            sim.params.p = p;
            sim.params.alpha = static_cast<std::uint32_t>(2 + local / (p - 1));
            sim.params.x[v] = static_cast<std::uint32_t>(1 + local % (p - 1));
            ++rr.work;
            if (!sim.site_ok(checks[0], in.known.at(checks[0].archive_id))) continue;
            if (sim.sites_ok(checks.subspan(1), in.known)) {
                ++rr.passed;
                rr.accepted.push_back({idx, encode(p, sim.params.alpha, sim.params.x[v])});
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

    for (const auto& acc : rep.accepted) {
        std::uint32_t p, alpha, x1;
        decode(acc.candidate, p, alpha, x1);
        TarsnapParams t = base_params(in.prof);
        t.p = p;
        t.alpha = alpha;
        t.x[0] = 1;
        t.x[v] = x1;
        TarsnapSim sim(t);
        std::uint64_t follow = 0;
        bool all = true;
        for (auto w : groups.values) {
            if (w == v) continue;
            const auto wchecks = check_sites(in.sites.at(w), 1, opt.amplification);
            bool found = false;
            for (std::uint32_t x = 1; x < p && !found; ++x) {
                ++follow;
                sim.params.x[w] = x;
                found = sim.sites_ok(wchecks, in.known);
            }
            if (!found) {
                all = false;
                break;
            }
            t.x[w] = sim.params.x[w];
        }
        if (all) {
            rep.winner = acc.index;
            rep.work_followup = follow;
            rep.params = t;
            rep.success = true;
            break;
        }
    }
    for (const auto& [w, s] : in.sites) rep.clashes_used += std::min<std::size_t>(s.size(), 1 + opt.amplification);
    if (!rep.success) rep.diagnostic = "exhausted: no candidate passed the consistency checks";
    finish_report(rep, t0);
    return rep;
}

}  // namespace rollbreak
