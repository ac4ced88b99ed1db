#include <algorithm>
#include <random>

#include "rollbreak/gf2.hpp"

namespace rollbreak {
namespace {

std::vector<unsigned> prime_divisors(unsigned n) {
    std::vector<unsigned> out;
    for (unsigned q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            out.push_back(q);
            while (n % q == 0) n /= q;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

int moebius(unsigned n) {
    int result = 1;
    for (unsigned q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            n /= q;
            if (n % q == 0) return 0;
            result = -result;
        }
    }
    if (n > 1) result = -result;
    return result;
}

GF2Poly random_below(std::mt19937_64& rng, int degree_bound) {
    std::vector<std::uint64_t> w(static_cast<std::size_t>(degree_bound + 63) / 64);
    for (auto& x : w) x = rng();
    return GF2Poly(std::move(w)).low_bits(static_cast<std::size_t>(degree_bound));
}

// g is squarefree with all irreducible factors of degree d.
void split_equal_degree(const GF2Poly& g, unsigned d, std::mt19937_64& rng, std::vector<GF2Poly>& out) {
    const int n = g.degree();
    if (n <= 0) return;
    if (static_cast<unsigned>(n) == d) {
        out.push_back(g);
        return;
    }
    PolyModulus mod(g);
    for (;;) {
        GF2Poly a = random_below(rng, n);
        if (a.degree() < 1) continue;
        GF2Poly t = a;
        GF2Poly acc = a;
        for (unsigned i = 1; i < d; ++i) {
            t = mod.sqrmod(t);
            acc += t;
        }
        GF2Poly h = poly_gcd(acc.is_zero() ? g : acc, g);
        const int dh = h.degree();
        if (dh > 0 && dh < n) {
            split_equal_degree(h, d, rng, out);
            split_equal_degree(poly_divmod(g, h).quotient, d, rng, out);
            return;
        }
    }
}

}  // namespace

bool is_irreducible(const GF2Poly& f) {
    const int n = f.degree();
    if (n < 1) throw std::domain_error("irreducibility is defined for degree >= 1");
    if (n <= 63) return is_irreducible_u64(f.low_word());
    if (!f.coeff(0)) return false;
    PolyModulus mod(f);
    const GF2Poly x = GF2Poly::monomial(1);
    std::vector<GF2Poly> powers{x};
    for (int k = 1; k <= n; ++k) powers.push_back(mod.sqrmod(powers.back()));
    if (powers.back() != x) return false;
    for (unsigned q : prime_divisors(static_cast<unsigned>(n))) {
        GF2Poly g = poly_gcd(powers[static_cast<std::size_t>(n) / q] + x, f);
        if (g.degree() != 0) return false;
    }
    return true;
}

std::vector<GF2Poly> irreducible_factors_of_degree(const GF2Poly& f, unsigned d) {
    if (f.is_zero()) throw std::domain_error("cannot factor the zero polynomial");
    if (d == 0 || f.degree() < static_cast<int>(d)) return {};
    const GF2Poly x = GF2Poly::monomial(1);
    // Product of the distinct irreducible factors whose degree divides d.
    GF2Poly g = poly_gcd(f, pow_x2d_mod(d, f) + x);
    for (unsigned e = 1; e < d; ++e) {
        if (d % e != 0 || g.degree() < static_cast<int>(e)) continue;
        GF2Poly h = poly_gcd(g, pow_x2d_mod(e, g) + x);
        if (h.degree() > 0) g = poly_divmod(g, h).quotient;
    }
    std::vector<GF2Poly> out;
    if (g.degree() < static_cast<int>(d)) return out;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ g.low_word());
    split_equal_degree(g, d, rng, out);
    std::sort(out.begin(), out.end());
    return out;
}

GF2Poly random_irreducible(unsigned degree, std::uint64_t seed) {
    if (degree < 1) throw std::domain_error("irreducible polynomials need degree >= 1");
    std::mt19937_64 rng(seed);
    for (;;) {
        GF2Poly cand = random_below(rng, static_cast<int>(degree));
        cand.set_coeff(degree, true);
        if (degree >= 2) cand.set_coeff(0, true);
        if (is_irreducible(cand)) return cand;
    }
}

std::uint64_t count_irreducible(unsigned d) {
    if (d == 0 || d > 62) throw std::domain_error("count_irreducible supports 1 <= d <= 62");
    std::int64_t total = 0;
    for (unsigned k = 1; k <= d; ++k) {
        if (d % k == 0) total += moebius(k) * (std::int64_t{1} << (d / k));
    }
    return static_cast<std::uint64_t>(total / static_cast<std::int64_t>(d));
}

}  // namespace rollbreak
