#include <algorithm>
#include <bit>
#include <stdexcept>

#include "rollbreak/gf2.hpp"
#include "rollbreak/simd.hpp"

namespace rollbreak {
namespace {

int top_bit(std::uint64_t w) { return 63 - std::countl_zero(w); }

int degree_of(const std::vector<std::uint64_t>& w) {
    for (std::size_t i = w.size(); i-- > 0;) {
        if (w[i] != 0) return static_cast<int>(i * 64) + top_bit(w[i]);
    }
    return -1;
}

void trim_words(std::vector<std::uint64_t>& w) {
    while (!w.empty() && w.back() == 0) w.pop_back();
}

// a ^= b << s (bits); grows a as needed.
void xor_shifted(std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b, std::size_t s) {
    const std::size_t off = s / 64;
    const unsigned bit = static_cast<unsigned>(s % 64);
    const std::size_t need = b.size() + off + (bit ? 1 : 0);
    if (a.size() < need) a.resize(need, 0);
    if (bit == 0) {
        for (std::size_t i = 0; i < b.size(); ++i) a[i + off] ^= b[i];
        return;
    }
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        a[i + off] ^= (b[i] << bit) | carry;
        carry = b[i] >> (64 - bit);
    }
    if (carry) a[b.size() + off] ^= carry;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

GF2Poly::GF2Poly(std::vector<std::uint64_t> words) : words_(std::move(words)) { trim(); }

void GF2Poly::trim() { trim_words(words_); }

GF2Poly GF2Poly::from_u64(std::uint64_t bits) {
    return GF2Poly(std::vector<std::uint64_t>{bits});
}

GF2Poly GF2Poly::monomial(std::size_t k) {
    std::vector<std::uint64_t> w(k / 64 + 1, 0);
    w[k / 64] = std::uint64_t{1} << (k % 64);
    return GF2Poly(std::move(w));
}

GF2Poly GF2Poly::from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.empty()) throw std::invalid_argument("empty hex polynomial");
    std::vector<std::uint64_t> w((hex.size() * 4 + 63) / 64, 0);
    std::size_t bitpos = 0;
    for (std::size_t i = hex.size(); i-- > 0;) {
        int v = hex_value(hex[i]);
        if (v < 0) throw std::invalid_argument("bad hex digit in polynomial: " + std::string(hex));
        w[bitpos / 64] |= static_cast<std::uint64_t>(v) << (bitpos % 64);
        bitpos += 4;
    }
    return GF2Poly(std::move(w));
}

std::string GF2Poly::to_hex() const {
    if (is_zero()) return "0";
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    const int nibbles = degree() / 4 + 1;
    out.reserve(static_cast<std::size_t>(nibbles));
    for (int n = nibbles - 1; n >= 0; --n) {
        std::size_t bit = static_cast<std::size_t>(n) * 4;
        out.push_back(kDigits[(words_[bit / 64] >> (bit % 64)) & 0xF]);
    }
    return out;
}

int GF2Poly::degree() const { return degree_of(words_); }

bool GF2Poly::coeff(std::size_t i) const {
    if (i / 64 >= words_.size()) return false;
    return (words_[i / 64] >> (i % 64)) & 1u;
}

void GF2Poly::set_coeff(std::size_t i, bool value) {
    if (i / 64 >= words_.size()) {
        if (!value) return;
        words_.resize(i / 64 + 1, 0);
    }
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    words_[i / 64] = value ? (words_[i / 64] | bit) : (words_[i / 64] & ~bit);
    trim();
}

GF2Poly GF2Poly::shifted_left(std::size_t k) const {
    std::vector<std::uint64_t> out;
    xor_shifted(out, words_, k);
    return GF2Poly(std::move(out));
}

GF2Poly GF2Poly::low_bits(std::size_t n) const {
    std::vector<std::uint64_t> w(words_.begin(),
                                 words_.begin() + static_cast<std::ptrdiff_t>(std::min(words_.size(), (n + 63) / 64)));
    if (n % 64 != 0 && w.size() == (n + 63) / 64) w.back() &= (std::uint64_t{1} << (n % 64)) - 1;
    return GF2Poly(std::move(w));
}

GF2Poly& GF2Poly::operator+=(const GF2Poly& other) {
    if (words_.size() < other.words_.size()) words_.resize(other.words_.size(), 0);
    simd::active().xor_into(words_.data(), other.words_.data(), other.words_.size());
    trim();
    return *this;
}

GF2Poly operator*(const GF2Poly& a, const GF2Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<std::uint64_t> out(a.words_.size() + b.words_.size());
    simd::active().mul(a.words_.data(), a.words_.size(), b.words_.data(), b.words_.size(), out.data());
    return GF2Poly(std::move(out));
}

std::strong_ordering GF2Poly::operator<=>(const GF2Poly& other) const {
    if (auto c = degree() <=> other.degree(); c != 0) return c;
    for (std::size_t i = words_.size(); i-- > 0;) {
        if (auto c = words_[i] <=> other.words_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

GF2Poly poly_add(const GF2Poly& a, const GF2Poly& b) { return a + b; }

GF2Poly poly_mul(const GF2Poly& a, const GF2Poly& b) { return a * b; }

DivMod poly_divmod(const GF2Poly& a, const GF2Poly& m) {
    const int dm = m.degree();
    if (dm < 0) throw std::domain_error("division by the zero polynomial");
    std::vector<std::uint64_t> rem(a.words().begin(), a.words().end());
    std::vector<std::uint64_t> mw(m.words().begin(), m.words().end());
    std::vector<std::uint64_t> quo;
    int dr = degree_of(rem);
    while (dr >= dm) {
        const std::size_t s = static_cast<std::size_t>(dr - dm);
        if (quo.size() <= s / 64) quo.resize(s / 64 + 1, 0);
        quo[s / 64] |= std::uint64_t{1} << (s % 64);
        xor_shifted(rem, mw, s);
        dr = degree_of(rem);
    }
    return {GF2Poly(std::move(quo)), GF2Poly(std::move(rem))};
}

GF2Poly poly_mod(const GF2Poly& a, const GF2Poly& m) {
    if (m.is_zero()) throw std::domain_error("reduction modulo the zero polynomial");
    if (a.degree() < m.degree()) return a;
    // Short quotients: plain long division beats building the shift table.
    if (a.degree() - m.degree() < 128) return poly_divmod(a, m).remainder;
    return PolyModulus(m).mod(a);
}

GF2Poly poly_mulmod(const GF2Poly& a, const GF2Poly& b, const GF2Poly& m) {
    if (m.is_zero()) throw std::domain_error("reduction modulo the zero polynomial");
    return poly_mod(a * b, m);
}

GF2Poly poly_gcd(const GF2Poly& a, const GF2Poly& b) {
    if (a.is_zero() && b.is_zero()) throw std::domain_error("gcd(0, 0) is undefined");
    std::vector<std::uint64_t> x(a.words().begin(), a.words().end());
    std::vector<std::uint64_t> y(b.words().begin(), b.words().end());
    int dx = degree_of(x);
    int dy = degree_of(y);
    while (dy >= 0) {
        if (dx < dy) {
            std::swap(x, y);
            std::swap(dx, dy);
        }
        xor_shifted(x, y, static_cast<std::size_t>(dx - dy));
        dx = degree_of(x);
        trim_words(x);
    }
    return GF2Poly(std::move(x));
}

GF2Poly pow_x2d_mod(unsigned d, const GF2Poly& m) {
    if (m.degree() < 1) throw std::domain_error("pow_x2d_mod needs a modulus of degree >= 1");
    PolyModulus mod(m);
    GF2Poly r = mod.mod(GF2Poly::monomial(1));
    for (unsigned i = 0; i < d; ++i) r = mod.sqrmod(r);
    return r;
}

// ---------------------------------------------------------------------------

PolyModulus::PolyModulus(const GF2Poly& m) : m_(m), deg_(m.degree()) {
    if (deg_ < 0) throw std::domain_error("zero modulus");
    nwords_ = m.words().size();
    std::vector<std::uint64_t> base(m.words().begin(), m.words().end());
    shifted_.resize(64);
    for (unsigned s = 0; s < 64; ++s) {
        std::vector<std::uint64_t> w(nwords_ + 1, 0);
        xor_shifted(w, base, s);
        w.resize(nwords_ + 1);
        shifted_[s] = std::move(w);
    }
}

void PolyModulus::reduce(std::vector<std::uint64_t>& a) const {
    trim_words(a);
    const std::size_t dm = static_cast<std::size_t>(deg_);
    while (!a.empty()) {
        const std::size_t top = a.size() - 1;
        const std::size_t deg = top * 64 + static_cast<std::size_t>(top_bit(a[top]));
        if (deg < dm) break;
        const std::size_t s = deg - dm;
        const std::size_t off = s / 64;
        const auto& sh = shifted_[s % 64];
        const std::size_t n = std::min(sh.size(), a.size() - off);
        for (std::size_t i = 0; i < n; ++i) a[off + i] ^= sh[i];
        trim_words(a);
    }
}

GF2Poly PolyModulus::mod(const GF2Poly& a) const {
    std::vector<std::uint64_t> w(a.words().begin(), a.words().end());
    reduce(w);
    return GF2Poly(std::move(w));
}

GF2Poly PolyModulus::mulmod(const GF2Poly& a, const GF2Poly& b) const {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<std::uint64_t> out(a.words().size() + b.words().size());
    simd::active().mul(a.words().data(), a.words().size(), b.words().data(), b.words().size(), out.data());
    reduce(out);
    return GF2Poly(std::move(out));
}

GF2Poly PolyModulus::sqrmod(const GF2Poly& a) const {
    if (a.is_zero()) return {};
    std::vector<std::uint64_t> out(2 * a.words().size());
    simd::active().sqr(a.words().data(), a.words().size(), out.data());
    reduce(out);
    return GF2Poly(std::move(out));
}

// ---------------------------------------------------------------------------

std::uint64_t Poly64Mod::reduce(std::uint64_t lo, std::uint64_t hi) const {
    while (hi != 0) {
        const int d = 64 + top_bit(hi);
        const int s = d - deg;  // s >= 1 since deg <= 63
        if (s >= 64) {
            hi ^= m << (s - 64);
        } else {
            lo ^= m << s;
            hi ^= m >> (64 - s);
        }
    }
    while (lo != 0 && top_bit(lo) >= deg) lo ^= m << (top_bit(lo) - deg);
    return lo;
}

std::uint64_t Poly64Mod::mulmod(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t lo;
    std::uint64_t hi;
    simd::active().clmul(a, b, &lo, &hi);
    return reduce(lo, hi);
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
    while (b != 0) {
        if (a == 0 || top_bit(a) < top_bit(b)) std::swap(a, b);
        if (b == 0) break;
        a ^= b << (top_bit(a) - top_bit(b));
    }
    return a;
}

bool is_irreducible_u64(std::uint64_t f) {
    if (f < 2) return false;
    const int n = top_bit(f);
    if (n == 1) return true;
    if ((f & 1u) == 0) return false;
    const Poly64Mod mod{f, n};
    // X^(2^k) mod f for k = 0..n
    std::vector<std::uint64_t> powers(static_cast<std::size_t>(n) + 1);
    powers[0] = 2;  // X, n >= 2
    for (int k = 1; k <= n; ++k) powers[static_cast<std::size_t>(k)] = mod.sqrmod(powers[static_cast<std::size_t>(k - 1)]);
    if (powers[static_cast<std::size_t>(n)] != 2) return false;
    int rest = n;
    for (int q = 2; q <= rest; ++q) {
        if (rest % q != 0) continue;
        while (rest % q == 0) rest /= q;
        const std::uint64_t g = gcd_u64(powers[static_cast<std::size_t>(n / q)] ^ 2u, f);
        if (g != 1) return false;
    }
    return true;
}

}  // namespace rollbreak
