#include <bit>
#include <cmath>
#include <stdexcept>

#include "rollbreak/chunk_state.hpp"
#include "rollbreak/util.hpp"

namespace rollbreak {
namespace {

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::uint32_t mulmod(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p);
}

}  // namespace

std::uint32_t powmod_u32(std::uint32_t base, std::uint64_t exp, std::uint32_t mod) {
    std::uint64_t r = 1 % mod, b = base % mod;
    while (exp) {
        if (exp & 1) r = r * b % mod;
        b = b * b % mod;
        exp >>= 1;
    }
    return static_cast<std::uint32_t>(r);
}

bool order_exceeds(std::uint32_t alpha, std::uint32_t p, std::uint32_t bound) {
    if (alpha % p == 0) return false;
    std::uint32_t order = p - 1;
    std::uint32_t n = p - 1;
    for (std::uint32_t q = 2; q * q <= n; ++q) {
        if (n % q) continue;
        while (n % q == 0) n /= q;
        while (order % q == 0 && powmod_u32(alpha, order / q, p) == 1) order /= q;
    }
    if (n > 1) {
        while (order % n == 0 && powmod_u32(alpha, order / n, p) == 1) order /= n;
    }
    return order > bound;
}

std::uint32_t tarsnap_sum(ByteView s, const TarsnapParams& p, std::uint64_t first_exp) {
    std::uint32_t a = powmod_u32(p.alpha, first_exp, p.p);
    std::uint64_t acc = 0;
    for (auto b : s) {
        acc = (acc + static_cast<std::uint64_t>(a) * p.x[b]) % p.p;
        a = mulmod(a, p.alpha, p.p);
    }
    return static_cast<std::uint32_t>(acc);
}

void validate(const TarsnapParams& p) {
    if (!is_prime_u32(p.p)) throw std::invalid_argument("tarsnap: p is not prime");
    if (p.alpha <= 1 || p.alpha >= p.p) throw std::invalid_argument("tarsnap: alpha out of range");
    if (p.mu == 0 || p.max_chunk == 0) throw std::invalid_argument("tarsnap: mu and max_chunk must be positive");
    if (!order_exceeds(p.alpha, p.p, p.max_chunk))
        throw std::invalid_argument("tarsnap: order of alpha does not exceed max_chunk");
    for (auto v : p.x) {
        if (v >= p.p) throw std::invalid_argument("tarsnap: x entry not below p");
    }
}

TarsnapParams tarsnap_keygen(std::uint64_t seed, const ScaleProfile& prof) {
    Rng rng(derive_seed(seed, 0x7a));
    const auto primes = canonical_primes(prof.prime_bits);
    TarsnapParams t;
    t.p = primes[uniform_below(rng, primes.size())];
    t.mu = prof.tarsnap_mu;
    t.max_chunk = prof.tarsnap_max;
    do {
        t.alpha = static_cast<std::uint32_t>(2 + uniform_below(rng, t.p - 2));
    } while (!order_exceeds(t.alpha, t.p, t.max_chunk));
    // Zero coefficients are excluded so that any entry can serve as the
    // normalization pivot.
    for (auto& v : t.x) v = static_cast<std::uint32_t>(1 + uniform_below(rng, t.p - 1));
    return t;
}

std::uint64_t TarsnapState::window_at(std::uint64_t j, std::uint32_t mu) {
    if (4 * j <= mu) return 0;
    return isqrt(4 * j - mu);
}

TarsnapState::TarsnapState(const TarsnapParams& p) : p_(&p) {
    std::size_t cap = 16;
    while (cap < 2 * static_cast<std::size_t>(p.max_chunk) + 2) cap <<= 1;
    mask_ = cap - 1;
    keys_.assign(cap, 0);
    vals_.assign(cap, 0);
    epochs_.assign(cap, 0);
}

void TarsnapState::reset() {
    j_ = 0;
    y_ = 0;
    apow_ = 1;
    w_ = 0;
    if (++epoch_ == 0) {
        std::fill(epochs_.begin(), epochs_.end(), 0);
        epoch_ = 1;
    }
}

std::optional<std::uint64_t> TarsnapState::lookup(std::uint32_t y) const {
    std::size_t i = ((y * 0x9e3779b97f4a7c15ULL) >> 32) & mask_;
    while (epochs_[i] == epoch_) {
        if (keys_[i] == y) return vals_[i];
        i = (i + 1) & mask_;
    }
    return std::nullopt;
}

void TarsnapState::insert(std::uint32_t y, std::uint32_t pos) {
    std::size_t i = ((y * 0x9e3779b97f4a7c15ULL) >> 32) & mask_;
    while (epochs_[i] == epoch_) {
        if (keys_[i] == y) {
            vals_[i] = pos;
            return;
        }
        i = (i + 1) & mask_;
    }
    epochs_[i] = epoch_;
    keys_[i] = y;
    vals_[i] = pos;
}

std::optional<Cause> TarsnapState::push(std::uint8_t b) {
    const auto& p = *p_;
    ++j_;
    apow_ = mulmod(apow_, p.alpha, p.p);
    y_ = static_cast<std::uint32_t>((y_ + static_cast<std::uint64_t>(apow_) * p.x[b]) % p.p);
    if (4 * j_ > p.mu) {
        const std::uint64_t lim = 4 * j_ - p.mu;
        while ((w_ + 1) * (w_ + 1) <= lim) ++w_;
    }
    if (w_ > 0) {
        if (auto k = lookup(y_); k && *k + w_ >= j_) {
            last_k_ = *k;
            return Cause::clash;
        }
    }
    if (j_ == p.max_chunk) return Cause::max_size;
    insert(y_, static_cast<std::uint32_t>(j_));
    return std::nullopt;
}

bool TarsnapState::would_clash(std::uint8_t b) const {
    const auto& p = *p_;
    const std::uint64_t j = j_ + 1;
    const std::uint64_t w = window_at(j, p.mu);
    if (w == 0) return false;
    const std::uint32_t a = mulmod(apow_, p.alpha, p.p);
    const auto y = static_cast<std::uint32_t>((y_ + static_cast<std::uint64_t>(a) * p.x[b]) % p.p);
    auto k = lookup(y);
    return k && *k + w >= j;
}

}  // namespace rollbreak
