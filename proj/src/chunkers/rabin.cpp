#include <stdexcept>

#include "rollbreak/chunk_state.hpp"
#include "rollbreak/util.hpp"

namespace rollbreak {

void validate(const RabinParams& p) {
    const int d = p.poly.degree();
    if (d < 8 || d > 56) throw std::invalid_argument("restic: polynomial degree must be in [8, 56]");
    if (static_cast<int>(p.mask_bits) >= d || p.mask_bits == 0)
        throw std::invalid_argument("restic: need 0 < mask_bits < degree");
    if (!is_irreducible(p.poly)) throw std::invalid_argument("restic: polynomial is not irreducible");
    if (p.window_bytes == 0) throw std::invalid_argument("restic: window must be positive");
    if (p.min_chunk == 0 || p.min_chunk >= p.max_chunk)
        throw std::invalid_argument("restic: need 0 < min_chunk < max_chunk");
    if (p.min_chunk < p.window_bytes) throw std::invalid_argument("restic: min_chunk must be at least the window");
}

RabinParams restic_keygen(std::uint64_t seed, const ScaleProfile& prof) {
    RabinParams r;
    r.poly = random_irreducible(prof.rabin_degree, derive_seed(seed, 0xc0));
    r.window_bytes = prof.rabin_window;
    r.mask_bits = prof.mask_bits;
    r.min_chunk = prof.min_chunk;
    r.max_chunk = prof.max_chunk;
    return r;
}

GF2Poly rabin_window_poly(ByteView window) {
    const std::size_t n = window.size();
    std::vector<std::uint64_t> words((8 * n + 63) / 64, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t bit = 8 * (n - 1 - i);
        words[bit / 64] |= std::uint64_t{window[i]} << (bit % 64);
    }
    return GF2Poly(std::move(words));
}

std::uint64_t rabin_fingerprint(ByteView window, const GF2Poly& poly) {
    return poly_mod(rabin_window_poly(window), poly).low_word();
}

RabinState::RabinState(const RabinParams& p)
    : p_(&p),
      deg_(static_cast<unsigned>(p.poly.degree())),
      dmask_((std::uint64_t{1} << deg_) - 1),
      cmask_((std::uint64_t{1} << p.mask_bits) - 1),
      ring_(p.window_bytes, 0) {
    const std::size_t out_shift = 8 * static_cast<std::size_t>(p.window_bytes);
    for (unsigned t = 0; t < 256; ++t) {
        const auto v = GF2Poly::from_u64(t);
        mod_table_[t] = poly_mod(v.shifted_left(deg_), p.poly).low_word();
        out_table_[t] = poly_mod(v.shifted_left(out_shift), p.poly).low_word();
    }
}

void RabinState::warm(ByteView data, std::uint64_t pos) {
    h_ = 0;
    seen_ = 0;
    ring_pos_ = 0;
    std::fill(ring_.begin(), ring_.end(), 0);
    const std::uint64_t n = p_->window_bytes;
    const std::uint64_t from = pos > n ? pos - n : 0;
    for (std::uint64_t i = from; i < pos; ++i) {
        h_ = rolled(data[i]);
        ring_[ring_pos_] = data[i];
        if (++ring_pos_ == ring_.size()) ring_pos_ = 0;
    }
    seen_ = pos;
    since_ = 0;
}

std::uint64_t RabinState::rolled(std::uint8_t b) const {
    const std::uint64_t top = h_ >> (deg_ - 8);
    return (((h_ << 8) & dmask_) | b) ^ mod_table_[top] ^ out_table_[ring_[ring_pos_]];
}

std::optional<Cause> RabinState::push(std::uint8_t b) {
    h_ = rolled(b);
    ring_[ring_pos_] = b;
    if (++ring_pos_ == ring_.size()) ring_pos_ = 0;
    ++seen_;
    ++since_;
    if (since_ >= p_->min_chunk && seen_ >= p_->window_bytes && (h_ & cmask_) == 0) return Cause::clash;
    if (since_ == p_->max_chunk) return Cause::max_size;
    return std::nullopt;
}

bool RabinState::would_clash(std::uint8_t b) const {
    return since_ + 1 >= p_->min_chunk && seen_ + 1 >= p_->window_bytes && (rolled(b) & cmask_) == 0;
}

}  // namespace rollbreak
