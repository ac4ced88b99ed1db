#include <algorithm>

#include "rollbreak/chunk_state.hpp"
#include "rollbreak/pipeline.hpp"

namespace rollbreak {

std::uint64_t DedupStore::put(ByteView chunk) {
    const bool fresh = digests_.insert(sha256(chunk)).second;
    if (fresh) lengths_.insert(chunk.size());
    const std::uint64_t grow = overhead_ + (fresh ? chunk.size() : 0);
    total_ += grow;
    return grow;
}

bool DedupStore::contains(ByteView chunk) const {
    return may_contain_length(chunk.size()) && digests_.count(sha256(chunk)) != 0;
}

std::uint64_t dedup_archive(DedupStore& store, std::span<const Bytes> chunks) {
    std::uint64_t grow = 0;
    for (const auto& c : chunks) grow += store.put(c);
    return grow;
}

std::uint64_t dedup_archive(DedupStore& store, const ChunkerParams& params, ByteView stream) {
    std::uint64_t grow = 0;
    for (const auto& r : chunk(params, stream)) grow += store.put(stream.subspan(r.start, r.length()));
    return grow;
}

DedupOracleResult dedup_boundary_oracle(const DedupStore& primed, const ChunkerParams& params, ByteView x,
                                        ByteView builder) {
    if (x.size() >= min_clash_length(params))
        throw std::invalid_argument("dedup oracle: X must be shorter than the minimum clash length");
    DedupOracleResult res;
    const std::uint64_t limit = std::min<std::uint64_t>(builder.size(), max_chunk_of(params));
    // The client chunks query||X from scratch for every probe. Its state after
    // the query bytes is shared between probes, so it is advanced
    // incrementally and copied before the X bytes are pushed.
    AnyState query_state(params);
    query_state.warm({}, 0);
    const std::uint64_t w = window_of(params);
    const std::uint64_t min_len = min_clash_length(params), max_len = max_chunk_of(params);
    // For window schemes a clash whose window lies inside X does not depend on
    // the query, so those positions are found once.
    std::vector<std::uint64_t> inner;
    if (w > 0 && x.size() >= w) {
        AnyState st(params);
        st.warm(x, w - 1);
        st.set_length(min_len);
        for (std::uint64_t i = w - 1; i < x.size(); ++i) {
            if (st.push(x[i]) == Cause::clash) inner.push_back(i);
        }
    }
    Bytes straddle, window;
    AnyState tail(params);
    for (std::uint64_t l = 1; l <= limit; ++l) {
        ++res.probes;
        const bool cut = query_state.push(builder[l - 1]).has_value();
        const std::uint64_t total = l + x.size();
        auto at = [&](std::uint64_t i) { return i < l ? builder[i] : x[i - l]; };
        std::vector<std::uint64_t> ends;
        if (cut) ends.push_back(l);
        if (w == 0) {
            tail = query_state;
            if (cut) tail.warm(builder.first(l), l);
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (tail.push(x[i])) {
                    ends.push_back(l + i + 1);
                    tail.reset();
                }
            }
        } else if (!cut) {
            // X is shorter than the minimum chunk, so at most one cut falls in
            // it, at the first index i with l+i+1 >= min that clashes or hits max.
            std::uint64_t first = x.size();
            const std::uint64_t s0 = min_len > l + 1 ? min_len - l - 1 : 0;
            if (max_len >= l + 1 && max_len - l - 1 < x.size()) first = max_len - l - 1;
            std::uint64_t i = s0;
            if (i < w - 1 && i < first) {
                const std::uint64_t pos = l + i;
                const std::uint64_t from = pos > w ? pos - w : 0;
                window.clear();
                for (std::uint64_t k = from; k < pos; ++k) window.push_back(at(k));
                tail.warm(window, window.size());
                tail.set_length(pos);
                for (; i < w - 1 && i < first; ++i) {
                    if (tail.push(x[i])) first = i;
                }
            }
            const auto it = std::lower_bound(inner.begin(), inner.end(), std::max<std::uint64_t>(i, w - 1));
            if (it != inner.end()) first = std::min(first, *it);
            if (first < x.size()) ends.push_back(l + first + 1);
        }
        if (ends.empty() || ends.back() != total) ends.push_back(total);

        // Pieces of query||X, compared by position so the concatenation is
        // only built for a spanning piece that could already be stored.
        std::vector<std::pair<std::uint64_t, std::uint64_t>> seen;
        std::uint64_t grow = 0, from = 0;
        for (auto e : ends) {
            const std::uint64_t len = e - from;
            bool novel = std::none_of(seen.begin(), seen.end(), [&](const auto& v) {
                if (v.second - v.first != len) return false;
                for (std::uint64_t k = 0; k < len; ++k) {
                    if (at(v.first + k) != at(from + k)) return false;
                }
                return true;
            });
            if (novel && primed.may_contain_length(len)) {
                if (e <= l) {
                    novel = !primed.contains(builder.subspan(from, len));
                } else if (from >= l) {
                    novel = !primed.contains(x.subspan(from - l, len));
                } else {
                    straddle.assign(builder.begin() + static_cast<std::ptrdiff_t>(from), builder.begin() + static_cast<std::ptrdiff_t>(l));
                    straddle.insert(straddle.end(), x.begin(), x.begin() + static_cast<std::ptrdiff_t>(e - l));
                    novel = !primed.contains(straddle);
                }
            }
            seen.emplace_back(from, e);
            grow += primed.overhead() + (novel ? len : 0);
            from = e;
        }
        if (grow <= l) {
            res.boundary = l;
            return res;
        }
        if (cut) return res;
    }
    return res;
}

}  // namespace rollbreak
