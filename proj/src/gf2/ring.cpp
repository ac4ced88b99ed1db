#include <stdexcept>

#include "rollbreak/gf2.hpp"
#include "rollbreak/simd.hpp"

namespace rollbreak {
namespace {

void check_width(unsigned w) {
    if (w == 0 || w > 64) throw std::invalid_argument("ring width must be in [1, 64]");
}

std::uint64_t rotl(std::uint64_t v, unsigned k, unsigned w) {
    k %= w;
    if (k == 0) return v;
    return ((v << k) | (v >> (w - k))) & ring_mask(w);
}

}  // namespace

std::uint64_t ring_mask(unsigned width) {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

RingElem RingElem::from_poly(const GF2Poly& p, unsigned width) {
    check_width(width);
    std::uint64_t v = 0;
    const int deg = p.degree();
    for (int i = 0; i <= deg; ++i) {
        if (p.coeff(static_cast<std::size_t>(i))) v ^= std::uint64_t{1} << (static_cast<unsigned>(i) % width);
    }
    return {v, width};
}

RingElem ring_add(RingElem a, RingElem b) {
    if (a.width != b.width) throw std::invalid_argument("ring width mismatch");
    return {a.value ^ b.value, a.width};
}

RingElem ring_mul(RingElem a, RingElem b) {
    if (a.width != b.width) throw std::invalid_argument("ring width mismatch");
    const unsigned w = a.width;
    std::uint64_t lo;
    std::uint64_t hi;
    simd::active().clmul(a.value, b.value, &lo, &hi);
    if (w == 64) return {lo ^ hi, w};
    // Fold the 2w-1 bit product: X^w == 1.
    std::uint64_t r = lo & ring_mask(w);
    std::uint64_t rest_lo = (lo >> w) | (hi << (64 - w));
    std::uint64_t rest_hi = hi >> w;
    while (rest_lo != 0 || rest_hi != 0) {
        r ^= rest_lo & ring_mask(w);
        rest_lo = (rest_lo >> w) | (rest_hi << (64 - w));
        rest_hi >>= w;
    }
    return {r, w};
}

RingElem ring_mul_x(RingElem a, unsigned k) { return {rotl(a.value, k, a.width), a.width}; }

RingElem ring_geometric_sum(std::uint64_t n, unsigned width) {
    check_width(width);
    std::uint64_t v = 0;
    const std::uint64_t full = n / width;
    const std::uint64_t rem = n % width;
    for (unsigned j = 0; j < width; ++j) {
        const std::uint64_t count = full + (j < rem ? 1 : 0);
        if (count & 1u) v |= std::uint64_t{1} << j;
    }
    return {v, width};
}

std::optional<RingElem> ring_inverse(RingElem a) {
    check_width(a.width);
    // Extended Euclid on (X^W + 1, a).
    GF2Poly r0 = GF2Poly::monomial(a.width) + GF2Poly::from_u64(1);
    GF2Poly r1 = GF2Poly::from_u64(a.value);
    GF2Poly t0;
    GF2Poly t1 = GF2Poly::from_u64(1);
    while (!r1.is_zero()) {
        DivMod qr = poly_divmod(r0, r1);
        GF2Poly t2 = t0 + qr.quotient * t1;
        r0 = std::move(r1);
        r1 = std::move(qr.remainder);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.degree() != 0) return std::nullopt;
    return RingElem::from_poly(t0, a.width);
}

}  // namespace rollbreak
