#include <algorithm>

#include "rollbreak/attacks.hpp"
#include "rollbreak/chunk_state.hpp"

namespace rollbreak {

bool site_consistent(const ChunkerParams& cand, const ClashSite& site, ByteView known) {
    std::size_t i = 0;
    while (i < site.spans.size()) {
        const std::uint64_t start = site.spans[i].start;
        std::size_t j = i;
        while (j < site.spans.size() && site.spans[j].start == start) ++j;
        const std::uint64_t last_end = site.spans[j - 1].end;
        auto r = next_boundary(cand, known, start, last_end);
        if (r && r->cause == Cause::clash) {
            for (std::size_t k = i; k < j; ++k) {
                if (site.spans[k].end == r->end) return true;
            }
        }
        i = j;
    }
    return false;
}

bool clash_consistency_check(const ChunkerParams& cand, std::span<const ClashSite> sites, const KnownMap& known) {
    for (const auto& s : sites) {
        auto it = known.find(s.archive_id);
        if (it == known.end()) return false;
        if (!site_consistent(cand, s, it->second)) return false;
    }
    return true;
}

}  // namespace rollbreak
