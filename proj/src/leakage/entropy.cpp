#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "rollbreak/leakage.hpp"
#include "rollbreak/util.hpp"

namespace rollbreak {
namespace {

std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

void GenericChunkModel::validate() const {
    if (clash_size == 0 || clash_size >= ring_size) throw std::invalid_argument("generic: need 0 < |R_C| < |R|");
    if (alphabet == 0 || alphabet > 256) throw std::invalid_argument("generic: alphabet must be in [1, 256]");
    if (min_chunk == 0 || min_chunk >= max_chunk) throw std::invalid_argument("generic: need 1 <= min < max");
}

std::vector<std::uint64_t> generic_chunk(const GenericChunkModel& model, std::uint64_t length, std::uint64_t seed) {
    model.validate();
    Rng rng(derive_seed(seed, 0x9e));
    const double q = model.clash_probability();
    const double log1mq = std::log1p(-q);
    std::vector<std::uint64_t> out;
    std::uint64_t pos = 0;
    while (pos < length) {
        // Failures before the first clash among the bytes at lengths >= min.
        const double u = 1.0 - uniform_unit(rng);
        const double k = std::floor(std::log(u) / log1mq);
        std::uint64_t len = model.max_chunk;
        if (k < static_cast<double>(model.max_chunk - model.min_chunk))
            len = model.min_chunk + static_cast<std::uint64_t>(k);
        len = std::min(len, length - pos);
        out.push_back(len);
        pos += len;
    }
    return out;
}

GenericState::GenericState(const GenericChunkModel& model, std::uint64_t key) : m_(&model), key_(key) { reset(); }

void GenericState::reset() {
    h_ = mix(key_) % m_->ring_size;
    since_ = 0;
}

std::uint64_t GenericState::next(std::uint8_t b) const {
    return mix(h_ ^ mix(key_ + b + 1)) % m_->ring_size;
}

std::optional<Cause> GenericState::push(std::uint8_t b) {
    h_ = next(b);
    ++since_;
    if (since_ >= m_->min_chunk && h_ < m_->clash_size) return Cause::clash;
    if (since_ == m_->max_chunk) return Cause::max_size;
    return std::nullopt;
}

bool GenericState::would_clash(std::uint8_t b) const {
    return since_ + 1 >= m_->min_chunk && next(b) < m_->clash_size;
}

std::vector<ChunkRecord> generic_chunk_content(const GenericChunkModel& model, std::uint64_t key, ByteView data) {
    model.validate();
    GenericState st(model, key);
    std::vector<ChunkRecord> out;
    std::uint64_t start = 0;
    for (std::uint64_t i = 0; i < data.size(); ++i) {
        if (auto c = st.push(data[i])) {
            out.push_back({start, i + 1, *c, std::nullopt});
            start = i + 1;
            st.reset();
        }
    }
    if (start < data.size()) out.push_back({start, data.size(), Cause::end_of_data, std::nullopt});
    return out;
}

double chunk_size_entropy(std::span<const std::uint64_t> lengths) {
    if (lengths.empty()) return 0.0;
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    for (auto l : lengths) ++counts[l];
    const double n = static_cast<double>(lengths.size());
    double h = 0;
    for (const auto& [l, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double geometric_entropy(double p) {
    if (p <= 0 || p > 1) throw std::invalid_argument("geometric_entropy: p must be in (0, 1]");
    if (p == 1) return 0.0;
    return (-(1 - p) * std::log2(1 - p) - p * std::log2(p)) / p;
}

double leakage_rate(double entropy_bits, double mean_chunk_bytes) {
    if (!(mean_chunk_bytes > 0)) throw std::invalid_argument("leakage_rate: mean chunk size must be positive");
    return entropy_bits / (8.0 * mean_chunk_bytes);
}

}  // namespace rollbreak
