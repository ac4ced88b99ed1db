#include <vector>

#include "doctest.h"
#include "rollbreak/gf2.hpp"
#include "rollbreak/simd.hpp"
#include "rollbreak/util.hpp"

using namespace rollbreak;

namespace {

std::vector<std::uint64_t> random_words(Rng& rng, std::size_t n) {
    std::vector<std::uint64_t> w(n);
    for (auto& x : w) x = rng();
    return w;
}

// Shift-and-xor product, word by word.
std::vector<std::uint64_t> ref_mul(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::vector<std::uint64_t> out(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (unsigned bit = 0; bit < 64; ++bit) {
            if (!((a[i] >> bit) & 1)) continue;
            for (std::size_t j = 0; j < b.size(); ++j) {
                out[i + j] ^= b[j] << bit;
                if (bit) out[i + j + 1] ^= b[j] >> (64 - bit);
            }
        }
    }
    return out;
}

void check_kernels(const simd::Kernels& k) {
    Rng rng(42);
    for (int t = 0; t < 300; ++t) {
        const std::size_t na = 1 + uniform_below(rng, 12), nb = 1 + uniform_below(rng, 12);
        auto a = random_words(rng, na), b = random_words(rng, nb);
        std::vector<std::uint64_t> out(na + nb, 0xdeadbeef);
        k.mul(a.data(), na, b.data(), nb, out.data());
        CHECK(out == ref_mul(a, b));
        std::vector<std::uint64_t> sq(2 * na, 0xdeadbeef);
        k.sqr(a.data(), na, sq.data());
        CHECK(sq == ref_mul(a, a));
        auto d = a;
        const auto s = random_words(rng, na);
        k.xor_into(d.data(), s.data(), na);
        for (std::size_t i = 0; i < na; ++i) CHECK(d[i] == (a[i] ^ s[i]));
        std::uint64_t lo = 0, hi = 0;
        k.clmul(a[0], b[0], &lo, &hi);
        auto one = ref_mul({a[0]}, {b[0]});
        CHECK(lo == one[0]);
        CHECK(hi == one[1]);
    }
}

}  // namespace

TEST_CASE("scalar kernels match the reference product") { check_kernels(simd::scalar_kernels()); }

TEST_CASE("x86 kernels are bit-identical to the scalar kernels") {
    const auto* x86 = simd::x86_kernels();
    if (!x86) {
        MESSAGE("x86 kernels unavailable on this machine; scalar path only");
        return;
    }
    check_kernels(*x86);
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        const std::size_t na = 1 + uniform_below(rng, 40), nb = 1 + uniform_below(rng, 40);
        auto a = random_words(rng, na), b = random_words(rng, nb);
        std::vector<std::uint64_t> o1(na + nb), o2(na + nb);
        simd::scalar_kernels().mul(a.data(), na, b.data(), nb, o1.data());
        x86->mul(a.data(), na, b.data(), nb, o2.data());
        CHECK(o1 == o2);
    }
}

TEST_CASE("library results do not depend on the kernel choice") {
    std::vector<GF2Poly> fast, slow;
    auto run = [&](std::vector<GF2Poly>& out) {
        Rng r(11);
        for (int t = 0; t < 40; ++t) {
            GF2Poly a(random_words(r, 8)), m(random_words(r, 1));
            if (m.degree() < 2) continue;
            out.push_back(poly_mulmod(a, a, m));
            out.push_back(poly_gcd(a, m));
            out.push_back(pow_x2d_mod(33, m));
        }
    };
    simd::force_scalar(false);
    run(fast);
    simd::force_scalar(true);
    CHECK(simd::active().name == simd::scalar_kernels().name);
    run(slow);
    simd::force_scalar(false);
    CHECK(fast == slow);
}
