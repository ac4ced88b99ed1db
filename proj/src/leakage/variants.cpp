#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "rollbreak/leakage.hpp"

namespace rollbreak {
namespace {

struct Region {
    std::vector<std::uint64_t> ends;
    std::vector<std::uint64_t> clens;
};

class Rechunker {
public:
    Rechunker(ByteView reference, const ChunkerParams& params, const CompressionModel& model)
        : params_(params), model_(model) {
        for (const auto& r : chunk(params, reference)) {
            starts_.push_back(r.start);
            ends_.insert(r.end);
        }
        window_ = std::max<std::uint64_t>(1, window_of(params));
    }

    // Chunks from the reference boundary at or before `first` until the
    // boundaries fall back in step with the reference past `last`.
    Region run(ByteView data, std::uint64_t first, std::uint64_t last) const {
        Region out;
        auto it = std::upper_bound(starts_.begin(), starts_.end(), first);
        std::uint64_t start = *std::prev(it);
        AnyState st(params_);
        st.warm(data, start);
        for (std::uint64_t i = start; i < data.size(); ++i) {
            if (auto c = st.push(data[i])) {
                const std::uint64_t end = i + 1;
                out.ends.push_back(end);
                out.clens.push_back(model_.compressed_size(data.subspan(start, end - start)));
                st.reset();
                start = end;
                if (end >= last + window_ && ends_.count(end)) return out;
            }
        }
        if (start < data.size()) {
            out.ends.push_back(data.size());
            out.clens.push_back(model_.compressed_size(data.subspan(start)));
        }
        return out;
    }

private:
    const ChunkerParams& params_;
    const CompressionModel& model_;
    std::vector<std::uint64_t> starts_;
    std::set<std::uint64_t> ends_;
    std::uint64_t window_;
};

double partition_bits(const std::map<std::vector<std::uint64_t>, std::size_t>& classes, std::size_t total) {
    double bits = 0;
    for (const auto& [k, n] : classes) {
        const double p = static_cast<double>(n) / static_cast<double>(total);
        bits -= p * std::log2(p);
    }
    return bits;
}

}  // namespace

VariantLeakReport variant_leak_assessment(ByteView reference, std::span<const VariantSlot> variants,
                                          const ChunkerParams& params, const CompressionModel& model) {
    VariantLeakReport rep;
    if (variants.empty() || reference.empty()) return rep;
    Rechunker rc(reference, params, model);
    Bytes data(reference.begin(), reference.end());
    for (const auto& v : variants) {
        if (v.offset >= data.size()) throw std::invalid_argument("variant offset beyond the reference");
        if (v.values.empty()) throw std::invalid_argument("variant without values");
        VariantOutcome o;
        o.offset = v.offset;
        o.values = v.values.size();
        std::map<std::vector<std::uint64_t>, std::size_t> observed;
        std::set<std::vector<std::uint64_t>> boundary_sets;
        const std::uint8_t orig = data[v.offset];
        for (auto val : v.values) {
            data[v.offset] = val;
            auto r = rc.run(data, v.offset, v.offset);
            boundary_sets.insert(r.ends);
            std::vector<std::uint64_t> key = r.ends;
            key.push_back(~std::uint64_t{0});
            key.insert(key.end(), r.clens.begin(), r.clens.end());
            ++observed[key];
        }
        data[v.offset] = orig;
        o.classes = observed.size();
        o.bits = partition_bits(observed, v.values.size());
        o.boundaries_change = boundary_sets.size() > 1;
        o.compressed_only = !o.boundaries_change && o.classes > 1;
        rep.leaked_bits += o.bits;
        rep.total_bits += std::log2(static_cast<double>(v.values.size()));
        if (o.boundaries_change) ++rep.boundary_changing;
        if (o.compressed_only) ++rep.compressed_only;
        rep.variants.push_back(o);
    }
    return rep;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> variant_tuple_histogram(
    ByteView reference, std::span<const std::uint64_t> offsets, std::span<const std::uint8_t> alphabet,
    const ChunkerParams& params, const CompressionModel& model) {
    if (offsets.empty() || alphabet.empty()) return {};
    const double tuples = std::pow(static_cast<double>(alphabet.size()), static_cast<double>(offsets.size()));
    if (tuples > static_cast<double>(1u << 24)) throw std::invalid_argument("too many value tuples to enumerate");
    for (auto o : offsets) {
        if (o >= reference.size()) throw std::invalid_argument("slot offset beyond the reference");
    }
    const auto [lo, hi] = std::minmax_element(offsets.begin(), offsets.end());
    Rechunker rc(reference, params, model);
    Bytes data(reference.begin(), reference.end());
    std::vector<std::size_t> digit(offsets.size(), 0);
    std::map<std::uint64_t, std::uint64_t> hist;
    for (;;) {
        for (std::size_t i = 0; i < offsets.size(); ++i) data[offsets[i]] = alphabet[digit[i]];
        auto r = rc.run(data, *lo, *hi);
        std::uint64_t total = 0;
        for (auto c : r.clens) total += c;
        ++hist[total];
        std::size_t i = 0;
        while (i < digit.size() && ++digit[i] == alphabet.size()) digit[i++] = 0;
        if (i == digit.size()) break;
    }
    return {hist.begin(), hist.end()};
}

Bytes gen_small_alphabet(std::span<const std::uint8_t> alphabet, std::uint64_t length, std::uint64_t seed) {
    if (alphabet.empty()) throw std::invalid_argument("empty alphabet");
    Rng rng(derive_seed(seed, 0xd7a));
    Bytes out(length);
    for (auto& b : out) b = alphabet[uniform_below(rng, alphabet.size())];
    return out;
}

}  // namespace rollbreak
