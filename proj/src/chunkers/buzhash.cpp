#include <stdexcept>

#include "rollbreak/chunk_state.hpp"
#include "rollbreak/util.hpp"

namespace rollbreak {
namespace {

std::uint64_t rotl(std::uint64_t v, unsigned k, unsigned width, std::uint64_t mask) {
    k %= width;
    if (k == 0) return v;
    return ((v << k) | (v >> (width - k))) & mask;
}

std::uint64_t width_mask(unsigned width) {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

}  // namespace

void validate(const BuzhashParams& p) {
    if (p.width == 0 || p.width > 64) throw std::invalid_argument("borg: width must be in [1, 64]");
    if (p.mask_bits == 0 || p.mask_bits > p.width) throw std::invalid_argument("borg: mask_bits must be in [1, W]");
    if (p.window == 0) throw std::invalid_argument("borg: window must be positive");
    if (p.min_chunk == 0 || p.min_chunk >= p.max_chunk)
        throw std::invalid_argument("borg: need 0 < min_chunk < max_chunk");
    if (p.min_chunk < p.window) throw std::invalid_argument("borg: min_chunk must be at least the window");
    const auto m = width_mask(p.width);
    for (auto v : p.table) {
        if (v & ~m) throw std::invalid_argument("borg: table entry wider than W");
    }
}

BuzhashParams borg_keygen(std::uint64_t seed, const ScaleProfile& prof) {
    Rng rng(derive_seed(seed, 0xb0));
    BuzhashParams b;
    b.width = prof.buzhash_width;
    b.window = prof.buzhash_window;
    b.mask_bits = prof.mask_bits;
    b.min_chunk = prof.min_chunk;
    b.max_chunk = prof.max_chunk;
    const auto m = width_mask(b.width);
    for (auto& v : b.table) v = rng() & m;
    return b;
}

std::uint64_t buzhash(ByteView window, const std::array<std::uint64_t, 256>& table, unsigned width) {
    const auto m = width_mask(width);
    std::uint64_t h = 0;
    for (auto b : window) h = rotl(h, 1, width, m) ^ table[b];
    return h;
}

BuzhashState::BuzhashState(const BuzhashParams& p)
    : p_(&p),
      wmask_(width_mask(p.width)),
      cmask_(width_mask(p.mask_bits)),
      out_rot_(p.window % p.width),
      ring_(p.window, 0) {}

void BuzhashState::warm(ByteView data, std::uint64_t pos) {
    const std::uint64_t n = p_->window;
    const std::uint64_t from = pos > n ? pos - n : 0;
    h_ = buzhash(data.subspan(from, pos - from), p_->table, p_->width);
    seen_ = pos;
    since_ = 0;
    // ring_[ring_pos_] always holds the byte that leaves next
    ring_pos_ = 0;
    std::fill(ring_.begin(), ring_.end(), 0);
    if (pos >= n) {
        for (std::uint64_t i = 0; i < n; ++i) ring_[i] = data[from + i];
    } else {
        for (std::uint64_t i = 0; i < pos; ++i) ring_[i] = data[i];
        ring_pos_ = static_cast<std::size_t>(pos);
    }
}

std::uint64_t BuzhashState::rolled(std::uint8_t b) const {
    std::uint64_t h = rotl(h_, 1, p_->width, wmask_) ^ p_->table[b];
    if (seen_ >= p_->window) h ^= rotl(p_->table[ring_[ring_pos_]], out_rot_, p_->width, wmask_);
    return h;
}

std::optional<Cause> BuzhashState::push(std::uint8_t b) {
    h_ = rolled(b);
    ring_[ring_pos_] = b;
    if (++ring_pos_ == ring_.size()) ring_pos_ = 0;
    ++seen_;
    ++since_;
    if (since_ >= p_->min_chunk && seen_ >= p_->window && (h_ & cmask_) == 0) return Cause::clash;
    if (since_ == p_->max_chunk) return Cause::max_size;
    return std::nullopt;
}

bool BuzhashState::would_clash(std::uint8_t b) const {
    return since_ + 1 >= p_->min_chunk && seen_ + 1 >= p_->window && (rolled(b) & cmask_) == 0;
}

}  // namespace rollbreak
