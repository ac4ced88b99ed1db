#include <algorithm>
#include <chrono>
#include <cstdio>

#include "rollbreak/attacks.hpp"

namespace rollbreak {
namespace {

using Clock = std::chrono::steady_clock;

struct EndQ {
    std::uint64_t end;
    RingElem q;
};

std::vector<EndQ> site_qs(const ClashSite& site, ByteView known, const ScaleProfile& prof, std::uint8_t v) {
    std::vector<EndQ> out;
    for (auto e : site.ends())
        out.push_back({e, borg_window_q(known, e, prof.buzhash_window, prof.buzhash_width, v)});
    return out;
}

BuzhashParams table_params(const ScaleProfile& prof) {
    BuzhashParams p;
    p.width = prof.buzhash_width;
    p.window = prof.buzhash_window;
    p.mask_bits = prof.mask_bits;
    p.min_chunk = prof.min_chunk;
    p.max_chunk = prof.max_chunk;
    return p;
}

bool low_zero(RingElem h, unsigned m) { return (h.value & ring_mask(m)) == 0; }

// Some end of every site satisfies the clash relation for (P0, P').
bool algebra_ok(const std::vector<std::vector<EndQ>>& sites, RingElem up0, RingElem pv, unsigned m) {
    for (const auto& ends : sites) {
        bool any = false;
        for (const auto& eq : ends) {
            if (low_zero(ring_add(up0, ring_mul(eq.q, pv)), m)) {
                any = true;
                break;
            }
        }
        if (!any) return false;
    }
    return true;
}

std::string encode(std::uint64_t p0, std::uint64_t p1) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "P0=%llx;P'=%llx", static_cast<unsigned long long>(p0),
                  static_cast<unsigned long long>(p1));
    return buf;
}

void decode(const std::string& s, std::uint64_t& p0, std::uint64_t& p1) {
    unsigned long long a = 0, b = 0;
    if (std::sscanf(s.c_str(), "P0=%llx;P'=%llx", &a, &b) != 2)
        throw std::invalid_argument("bad borg candidate: " + s);
    p0 = a;
    p1 = b;
}

}  // namespace

RingElem borg_window_q(ByteView known, std::uint64_t end, std::uint32_t window, unsigned width, std::uint8_t value) {
    if (end < window) throw std::invalid_argument("borg_window_q: window starts before the data");
    std::uint64_t q = 0;
    unsigned r = 0;
    for (std::uint32_t k = 0; k < window; ++k) {
        if (known[end - 1 - k] == value) q ^= std::uint64_t{1} << r;
        if (++r == width) r = 0;
    }
    return {q, width};
}

AttackReport attack_borg_poly(const TwoValuedInput& in, const AttackOptions& opt) {
    const auto t0 = Clock::now();
    AttackReport rep;
    rep.attack = "borg-poly";
    rep.scheme = Scheme::borg;
    rep.profile = in.prof.name;
    rep.shard = opt.shard;
    auto done = [&] {
        rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        return rep;
    };
    const unsigned W = in.prof.buzhash_width;
    const unsigned m = in.prof.mask_bits;
    const std::uint64_t residuals = std::uint64_t{1} << (W - m);
    if (in.sites.empty()) throw std::invalid_argument("no clash sites supplied");
    for (const auto& [v, s] : in.sites) {
        if (v == 0) throw std::invalid_argument("byte value 0 is the reference value and cannot be attacked");
    }
    const RingElem U = ring_geometric_sum(in.prof.buzhash_window, W);
    const auto Uinv = ring_inverse(U);
    if (!Uinv) throw std::invalid_argument("window sum is not invertible for this width and window");
    rep.set_extra("residual_loop", std::to_string(residuals));

    const std::uint8_t v1 = in.sites.begin()->first;
    const auto& sites = in.sites.begin()->second;
    if (sites.size() < 4) throw std::invalid_argument("the first byte value needs at least 4 clashes");
    std::vector<std::vector<EndQ>> qs;
    for (const auto& s : sites) qs.push_back(site_qs(s, in.known.at(s.archive_id), in.prof, v1));

    // First pair whose difference Q is invertible for every end choice.
    std::size_t pa = 0, pb = 0;
    bool found = false;
    std::vector<RingElem> pair_inv;
    for (std::size_t a = 0; a < qs.size() && !found; ++a) {
        for (std::size_t b = a + 1; b < qs.size() && !found; ++b) {
            std::vector<RingElem> invs;
            bool ok = true;
            for (const auto& x : qs[a]) {
                for (const auto& y : qs[b]) {
                    auto inv = ring_inverse(ring_add(x.q, y.q));
                    if (!inv) {
                        ok = false;
                        break;
                    }
                    invs.push_back(*inv);
                }
                if (!ok) break;
            }
            if (ok && qs.size() - 2 >= 2) {
                pa = a;
                pb = b;
                pair_inv = std::move(invs);
                found = true;
            }
        }
    }
    if (!found) {
        rep.diagnostic = "no clash pair with invertible difference: supply more clashes";
        return done();
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (i != pa && i != pb) rest.push_back(i);
    }
    const std::size_t c3 = rest[0];
    std::vector<std::vector<EndQ>> checks;
    std::vector<ClashSite> sim_sites;
    for (std::size_t i = 1; i < rest.size(); ++i) checks.push_back(qs[rest[i]]);
    for (std::size_t i = 0; i < rest.size() && sim_sites.size() < 1 + opt.amplification; ++i)
        sim_sites.push_back(sites[rest[i]]);
    rep.set_extra("pair", std::to_string(pa) + "," + std::to_string(pb));
    rep.clashes_used = 2 + rest.size();

    rep.index_space = pair_inv.size() * residuals;
    std::tie(rep.range_begin, rep.range_end) = shard_range(rep.index_space, opt.shard);
    BuzhashParams base = table_params(in.prof);

    auto kernel = [&](std::uint64_t b, std::uint64_t e, RangeResult& rr) {
        BuzhashParams cand = base;
        for (std::uint64_t idx = b; idx < e; ++idx) {
            ++rr.work;
            const RingElem inv = pair_inv[idx / residuals];
            const RingElem z{(idx % residuals) << m, W};
            const RingElem pv = ring_mul(inv, z);
            for (const auto& e3 : qs[c3]) {
                const RingElem up0 = ring_mul(e3.q, pv);
                if (!algebra_ok(checks, up0, pv, m)) continue;
                const RingElem p0 = ring_mul(*Uinv, up0);
                cand.table.fill(0);
                cand.table[0] = p0.value;
                cand.table[v1] = p0.value ^ pv.value;
                if (clash_consistency_check(cand, sim_sites, in.known)) {
                    ++rr.passed;
                    rr.accepted.push_back({idx, encode(p0.value, pv.value)});
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

    for (const auto& acc : rep.accepted) {
        std::uint64_t p0v, p1v;
        decode(acc.candidate, p0v, p1v);
        const RingElem P0{p0v, W};
        const RingElem up0 = ring_mul(U, P0);
        BuzhashParams t = base;
        t.table[0] = p0v;
        t.table[v1] = p0v ^ p1v;
        std::uint64_t follow = 0;
        bool all = true;
        for (const auto& [v, vs] : in.sites) {
            if (v == v1) continue;
            if (vs.size() < 2) {
                all = false;
                break;
            }
            std::vector<std::vector<EndQ>> vq;
            for (const auto& s : vs) vq.push_back(site_qs(s, in.known.at(s.archive_id), in.prof, v));
            bool got = false;
            for (std::size_t a = 0; a < vq.size() && !got; ++a) {
                std::vector<std::vector<EndQ>> others;
                std::vector<ClashSite> others_sim;
                for (std::size_t i = 0; i < vq.size(); ++i) {
                    if (i == a) continue;
                    others.push_back(vq[i]);
                    if (others_sim.size() < 1 + opt.amplification) others_sim.push_back(vs[i]);
                }
                for (const auto& ea : vq[a]) {
                    const auto qinv = ring_inverse(ea.q);
                    if (!qinv) continue;
                    for (std::uint64_t z = 0; z < residuals; ++z) {
                        ++follow;
                        const RingElem pv = ring_mul(*qinv, ring_add(RingElem{z << m, W}, up0));
                        if (!algebra_ok(others, up0, pv, m)) continue;
                        BuzhashParams cand = t;
                        cand.table[v] = p0v ^ pv.value;
                        if (clash_consistency_check(cand, others_sim, in.known)) {
                            t.table[v] = cand.table[v];
                            got = true;
                            break;
                        }
                    }
                    if (got) break;
                }
            }
            if (!got) {
                all = false;
                break;
            }
        }
        if (all) {
            rep.success = true;
            rep.winner = acc.index;
            rep.work_followup = follow;
            rep.params = t;
            break;
        }
    }
    for (const auto& [v, vs] : in.sites) {
        if (v != v1) rep.clashes_used += vs.size();
    }
    if (!rep.success)
        rep.diagnostic = rep.accepted.empty() ? "exhausted: no (P0, P') candidate survived"
                                              : "exhausted: no candidate extended to every byte value";
    return done();
}

}  // namespace rollbreak
