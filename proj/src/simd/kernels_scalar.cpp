#include <array>
#include <cstring>

#include "rollbreak/simd.hpp"

namespace rollbreak::simd {
namespace {

// 4-bit windowed shift-and-add carry-less multiply.
void clmul_scalar(std::uint64_t a, std::uint64_t b, std::uint64_t* lo, std::uint64_t* hi) {
    std::array<std::uint64_t, 16> tlo{};
    std::array<std::uint64_t, 16> thi{};
    for (unsigned k = 1; k < 16; ++k) {
        std::uint64_t l = 0;
        std::uint64_t h = 0;
        for (unsigned bit = 0; bit < 4; ++bit) {
            if ((k >> bit) & 1u) {
                l ^= a << bit;
                h ^= bit == 0 ? 0 : a >> (64 - bit);
            }
        }
        tlo[k] = l;
        thi[k] = h;
    }
    std::uint64_t rl = 0;
    std::uint64_t rh = 0;
    for (int shift = 60; shift >= 0; shift -= 4) {
        unsigned nib = static_cast<unsigned>((b >> shift) & 0xF);
        // (rh:rl) <<= 4 happens implicitly by placing the nibble product at `shift`.
        std::uint64_t l = tlo[nib];
        std::uint64_t h = thi[nib];
        if (shift == 0) {
            rl ^= l;
            rh ^= h;
        } else {
            rl ^= l << shift;
            rh ^= (h << shift) | (l >> (64 - shift));
        }
    }
    *lo = rl;
    *hi = rh;
}

void mul_scalar(const std::uint64_t* a, std::size_t na, const std::uint64_t* b, std::size_t nb,
                std::uint64_t* out) {
    std::memset(out, 0, (na + nb) * sizeof(std::uint64_t));
    for (std::size_t i = 0; i < na; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < nb; ++j) {
            std::uint64_t lo;
            std::uint64_t hi;
            clmul_scalar(a[i], b[j], &lo, &hi);
            out[i + j] ^= lo;
            out[i + j + 1] ^= hi;
        }
    }
}

constexpr std::array<std::uint16_t, 256> make_spread_table() {
    std::array<std::uint16_t, 256> t{};
    for (unsigned v = 0; v < 256; ++v) {
        std::uint16_t s = 0;
        for (unsigned bit = 0; bit < 8; ++bit) {
            if ((v >> bit) & 1u) s = static_cast<std::uint16_t>(s | (1u << (2 * bit)));
        }
        t[v] = s;
    }
    return t;
}

constexpr auto kSpread = make_spread_table();

std::uint64_t spread32(std::uint32_t v) {
    std::uint64_t r = 0;
    for (unsigned byte = 0; byte < 4; ++byte) {
        r |= static_cast<std::uint64_t>(kSpread[(v >> (8 * byte)) & 0xFF]) << (16 * byte);
    }
    return r;
}

void sqr_scalar(const std::uint64_t* a, std::size_t n, std::uint64_t* out) {
    for (std::size_t i = 0; i < n; ++i) {
        out[2 * i] = spread32(static_cast<std::uint32_t>(a[i]));
        out[2 * i + 1] = spread32(static_cast<std::uint32_t>(a[i] >> 32));
    }
}

void xor_into_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] ^= src[i];
}

constexpr Kernels kScalar{"scalar", mul_scalar, sqr_scalar, xor_into_scalar, clmul_scalar};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace rollbreak::simd
