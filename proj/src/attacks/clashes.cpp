#include <algorithm>
#include <stdexcept>

#include "rollbreak/attacks.hpp"

namespace rollbreak {

std::vector<std::uint64_t> ClashSite::ends() const {
    std::vector<std::uint64_t> out;
    for (const auto& s : spans) out.push_back(s.end);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ChunkLimits limits_of(const ChunkerParams& p) { return {scheme_of(p), min_clash_length(p), max_chunk_of(p)}; }

ChunkLimits limits_of(Scheme s, const ScaleProfile& prof) {
    switch (s) {
        case Scheme::tarsnap: return {s, prof.tarsnap_mu / 4u + 1u, prof.tarsnap_max};
        case Scheme::borg:
        case Scheme::restic: return {s, prof.min_chunk, prof.max_chunk};
    }
    throw std::invalid_argument("unknown scheme");
}

namespace {

struct Edge {
    std::uint64_t start;
    std::uint64_t end;
    Cause cause;
};

}  // namespace

ExtractResult extract_clashes(const ObservationLog& log, std::uint64_t archive_id, ByteView known,
                              const CompressionModel& model, const ChunkLimits& limits, std::size_t max_candidates) {
    ExtractResult res;
    const auto obs = log.archive(archive_id);
    res.chunks = obs.size();
    if (obs.empty()) {
        res.consistent = known.empty();
        if (!res.consistent) res.diagnostic = "no observations for a non-empty plaintext";
        return res;
    }
    const std::uint64_t total = known.size();
    std::vector<std::vector<Edge>> edges(obs.size());
    std::vector<std::uint64_t> starts{0};
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const bool last = i + 1 == obs.size();
        std::vector<std::uint64_t> next;
        for (auto s : starts) {
            const std::uint64_t lmax = std::min<std::uint64_t>(limits.max_chunk, total - s);
            std::vector<std::uint64_t> lens;
            if (obs[i].ulen) {
                if (*obs[i].ulen >= 1 && *obs[i].ulen <= lmax) lens.push_back(*obs[i].ulen);
            } else {
                lens = model.matching_prefixes(known.subspan(s), obs[i].clen, 1, lmax);
            }
            for (auto len : lens) {
                const std::uint64_t e = s + len;
                Cause c;
                if (last) {
                    if (e != total) continue;
                    c = Cause::end_of_data;
                } else if (e == total) {
                    continue;
                } else if (len == limits.max_chunk) {
                    c = Cause::max_size;
                } else if (len >= limits.min_clash) {
                    c = Cause::clash;
                } else {
                    continue;
                }
                edges[i].push_back({s, e, c});
                next.push_back(e);
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        if (next.empty()) {
            res.consistent = false;
            res.diagnostic = "chunk " + std::to_string(i) + " of archive " + std::to_string(archive_id) +
                             " has no interpretation consistent with the known plaintext";
            return res;
        }
        if (next.size() > max_candidates) {
            res.truncated = true;
            next.resize(max_candidates);
        }
        starts = std::move(next);
    }
    // backward pruning: keep only interpretations that reach the end
    std::vector<std::uint64_t> alive{total};
    for (std::size_t i = obs.size(); i-- > 0;) {
        std::vector<Edge> kept;
        std::vector<std::uint64_t> prev;
        for (const auto& e : edges[i]) {
            if (std::binary_search(alive.begin(), alive.end(), e.end)) {
                kept.push_back(e);
                prev.push_back(e.start);
            }
        }
        std::sort(prev.begin(), prev.end());
        prev.erase(std::unique(prev.begin(), prev.end()), prev.end());
        edges[i] = std::move(kept);
        alive = std::move(prev);
    }
    if (alive.empty() || alive.front() != 0) {
        res.consistent = false;
        res.diagnostic = "no interpretation of archive " + std::to_string(archive_id) + " tiles the known plaintext";
        return res;
    }
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto& es = edges[i];
        const bool all_clash = std::all_of(es.begin(), es.end(), [](const Edge& e) { return e.cause == Cause::clash; });
        const bool all_max = std::all_of(es.begin(), es.end(), [](const Edge& e) { return e.cause == Cause::max_size; });
        if (all_clash) {
            ClashSite site{archive_id, i, log.scheme, {}};
            for (const auto& e : es) site.spans.push_back({e.start, e.end});
            std::sort(site.spans.begin(), site.spans.end());
            res.sites.push_back(std::move(site));
        } else if (all_max) {
            ++res.max_size_chunks;
        } else if (es.front().cause != Cause::end_of_data) {
            ++res.ambiguous_chunks;
        }
    }
    return res;
}

Bytes gen_two_valued_plaintext(std::uint8_t a, std::uint8_t b, std::uint64_t length, std::uint64_t seed) {
    if (a == b) throw std::invalid_argument("two-valued plaintext needs two distinct bytes");
    Rng rng(seed);
    Bytes out(length);
    std::uint64_t bits = 0;
    for (std::uint64_t i = 0; i < length; ++i) {
        if (i % 64 == 0) bits = rng();
        out[i] = (bits >> (i % 64)) & 1 ? b : a;
    }
    return out;
}

ShardSpec parse_shard(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) throw std::invalid_argument("shard must look like i/N");
    auto num = [](std::string_view s) {
        if (s.empty() || s.size() > 9 || s.find_first_not_of("0123456789") != std::string_view::npos)
            throw std::invalid_argument("shard must look like i/N");
        return static_cast<std::uint32_t>(std::stoul(std::string(s)));
    };
    ShardSpec s{num(text.substr(0, slash)), num(text.substr(slash + 1))};
    if (s.total == 0 || s.index >= s.total) throw std::invalid_argument("shard index must be below shard total");
    return s;
}

std::pair<std::uint64_t, std::uint64_t> shard_range(std::uint64_t n, ShardSpec s) {
    auto at = [n, s](std::uint64_t i) {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(n) * i / s.total);
    };
    return {at(s.index), at(s.index + 1)};
}

RangeResult run_range(std::uint64_t begin, std::uint64_t end, unsigned jobs,
                      const std::function<void(std::uint64_t, std::uint64_t, RangeResult&)>& kernel) {
    jobs = std::max(1u, jobs);
    const std::uint64_t n = end - begin;
    if (jobs == 1 || n < jobs) {
        RangeResult r;
        if (n) kernel(begin, end, r);
        return r;
    }
    std::vector<RangeResult> parts(jobs);
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) {
        const auto [b, e] = shard_range(n, {j, jobs});
        threads.emplace_back([&, b = b, e = e, j] { kernel(begin + b, begin + e, parts[j]); });
    }
    for (auto& t : threads) t.join();
    RangeResult out;
    for (auto& p : parts) {
        out.work += p.work;
        out.passed += p.passed;
        out.failed += p.failed;
        out.accepted.insert(out.accepted.end(), p.accepted.begin(), p.accepted.end());
    }
    std::stable_sort(out.accepted.begin(), out.accepted.end(),
                     [](const Accepted& a, const Accepted& b) { return a.index < b.index; });
    return out;
}

namespace {

ExtractResult extract_checked(const ObservationLog& log, std::uint64_t id, const KnownMap& known,
                              const ScaleProfile& prof, std::size_t max_candidates) {
    auto it = known.find(id);
    if (it == known.end()) throw std::invalid_argument("no known plaintext for archive " + std::to_string(id));
    auto r = extract_clashes(log, id, it->second, compression_model(log.compressor), limits_of(log.scheme, prof),
                             max_candidates);
    if (!r.consistent) throw FormatError("archive " + std::to_string(id) + ": " + r.diagnostic);
    return r;
}

}  // namespace

KnownInput make_known_input(const ObservationLog& log, const KnownMap& known, const ScaleProfile& prof,
                            std::size_t max_candidates) {
    KnownInput in;
    in.prof = prof;
    in.compressor = log.compressor;
    in.known = known;
    for (auto id : log.archive_ids()) {
        auto r = extract_checked(log, id, known, prof, max_candidates);
        in.sites.insert(in.sites.end(), r.sites.begin(), r.sites.end());
    }
    return in;
}

TwoValuedInput make_two_valued_input(const ObservationLog& log, const KnownMap& known, const ScaleProfile& prof,
                                     std::size_t max_candidates) {
    TwoValuedInput in;
    in.prof = prof;
    in.compressor = log.compressor;
    in.known = known;
    for (auto id : log.archive_ids()) {
        auto it = known.find(id);
        if (it == known.end()) throw std::invalid_argument("no known plaintext for archive " + std::to_string(id));
        std::optional<std::uint8_t> v;
        for (auto b : it->second) {
            if (b == 0) continue;
            if (v && *v != b) throw std::invalid_argument("archive " + std::to_string(id) + " is not over {0, v}");
            v = b;
        }
        if (!v) throw std::invalid_argument("archive " + std::to_string(id) + " has no nonzero byte");
        auto r = extract_checked(log, id, known, prof, max_candidates);
        auto& g = in.sites[*v];
        g.insert(g.end(), r.sites.begin(), r.sites.end());
    }
    return in;
}

}  // namespace rollbreak
