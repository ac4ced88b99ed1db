#include <stdexcept>

#include "rollbreak/pipeline.hpp"

namespace rollbreak {
namespace {

constexpr std::uint8_t kEsc = 0xFF;
constexpr std::uint64_t kMaxRun = 255;
constexpr std::uint64_t kMinRun = 4;

std::uint64_t literal_cost(std::uint8_t b) { return b == kEsc ? 3 : 1; }

// Encoded size of a run of r copies of b.
std::uint64_t run_cost(std::uint64_t r, std::uint8_t b) {
    const std::uint64_t q = r % kMaxRun;
    return 3 * (r / kMaxRun) + (q >= kMinRun ? 3 : q * literal_cost(b));
}

std::uint64_t run_length(ByteView d, std::size_t i) {
    std::size_t j = i;
    while (j < d.size() && d[j] == d[i]) ++j;
    return j - i;
}

class Identity final : public CompressionModel {
public:
    std::string_view name() const override { return "identity"; }
    Bytes compress(ByteView d) const override { return Bytes(d.begin(), d.end()); }
    Bytes decompress(ByteView d) const override { return Bytes(d.begin(), d.end()); }
    std::uint64_t compressed_size(ByteView d) const override { return d.size(); }
    std::vector<std::uint64_t> prefix_sizes(ByteView d) const override {
        std::vector<std::uint64_t> s(d.size() + 1);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
        return s;
    }
    std::uint64_t prefix_slack() const override { return 0; }
    std::vector<std::uint64_t> matching_prefixes(ByteView d, std::uint64_t clen, std::uint64_t lmin,
                                                 std::uint64_t lmax) const override {
        if (clen >= lmin && clen <= lmax && clen <= d.size()) return {clen};
        return {};
    }
};

class ToyRle final : public CompressionModel {
public:
    std::string_view name() const override { return "toy-rle"; }
    Bytes compress(ByteView d) const override { return compress_toy_rle(d); }
    Bytes decompress(ByteView d) const override { return decompress_toy_rle(d); }
    std::uint64_t compressed_size(ByteView d) const override {
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < d.size();) {
            const auto r = run_length(d, i);
            s += run_cost(r, d[i]);
            i += r;
        }
        return s;
    }
    std::vector<std::uint64_t> prefix_sizes(ByteView d) const override {
        std::vector<std::uint64_t> s(d.size() + 1, 0);
        std::uint64_t base = 0;
        for (std::size_t i = 0; i < d.size();) {
            const auto r = run_length(d, i);
            for (std::uint64_t k = 1; k <= r; ++k) s[i + k] = base + run_cost(k, d[i]);
            base += run_cost(r, d[i]);
            i += r;
        }
        return s;
    }
    std::uint64_t prefix_slack() const override { return 6; }
    std::vector<std::uint64_t> matching_prefixes(ByteView d, std::uint64_t clen, std::uint64_t lmin,
                                                 std::uint64_t lmax) const override {
        std::vector<std::uint64_t> out;
        const std::uint64_t end = std::min<std::uint64_t>(lmax, d.size());
        std::uint64_t base = 0;
        for (std::size_t i = 0; i < end;) {
            std::uint64_t r = run_length(d.first(end), i);
            for (std::uint64_t k = 1; k <= r; ++k) {
                const std::uint64_t len = i + k;
                const std::uint64_t size = base + run_cost(k, d[i]);
                if (len >= lmin && size == clen) out.push_back(len);
            }
            base += run_cost(r, d[i]);
            // every longer prefix compresses to at least base
            if (base > clen) break;
            i += r;
        }
        return out;
    }
};

const Identity kIdentity;
const ToyRle kToyRle;

}  // namespace

Bytes compress_toy_rle(ByteView d) {
    Bytes out;
    out.reserve(d.size());
    for (std::size_t i = 0; i < d.size();) {
        const std::uint8_t b = d[i];
        std::uint64_t r = run_length(d, i);
        i += r;
        while (r >= kMaxRun) {
            out.insert(out.end(), {kEsc, static_cast<std::uint8_t>(kMaxRun), b});
            r -= kMaxRun;
        }
        if (r >= kMinRun) {
            out.insert(out.end(), {kEsc, static_cast<std::uint8_t>(r), b});
        } else {
            for (std::uint64_t k = 0; k < r; ++k) {
                if (b == kEsc) out.insert(out.end(), {kEsc, 1, kEsc});
                else out.push_back(b);
            }
        }
    }
    return out;
}

Bytes decompress_toy_rle(ByteView d) {
    Bytes out;
    for (std::size_t i = 0; i < d.size();) {
        if (d[i] != kEsc) {
            out.push_back(d[i++]);
            continue;
        }
        if (i + 2 >= d.size()) throw FormatError("toy-rle: truncated run token");
        const std::uint8_t len = d[i + 1];
        if (len == 0) throw FormatError("toy-rle: zero-length run token");
        out.insert(out.end(), len, d[i + 2]);
        i += 3;
    }
    return out;
}

const CompressionModel& compression_model(std::string_view name) {
    if (name == "identity") return kIdentity;
    if (name == "toy-rle") return kToyRle;
    throw std::invalid_argument("unknown compressor: " + std::string(name));
}

std::vector<std::string_view> compression_model_names() { return {"identity", "toy-rle"}; }

std::vector<std::uint64_t> enumerate_prefix_lengths(ByteView known, std::uint64_t start, std::uint64_t observed_clen,
                                                    const CompressionModel& model, std::uint64_t lmin,
                                                    std::uint64_t lmax) {
    if (start > known.size()) return {};
    return model.matching_prefixes(known.subspan(start), observed_clen, lmin, lmax);
}

}  // namespace rollbreak
