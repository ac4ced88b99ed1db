#pragma once
// Exact arithmetic over GF(2): bit-packed polynomials, the cyclic ring
// GF(2)[X]/(X^W - 1), and dense linear systems.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rollbreak {

/// Polynomial over GF(2). Bit i of the packed words is the coefficient of X^i.
/// The word vector never carries high zero words, so equality is structural.
class GF2Poly {
public:
    GF2Poly() = default;
    explicit GF2Poly(std::vector<std::uint64_t> words);

    static GF2Poly from_u64(std::uint64_t bits);
    static GF2Poly monomial(std::size_t k);
    /// Big-endian hex, least significant bit = X^0. Accepts an optional 0x prefix.
    static GF2Poly from_hex(std::string_view hex);
    /// Lowercase hex without prefix; "0" for the zero polynomial.
    std::string to_hex() const;

    /// -1 for the zero polynomial.
    int degree() const;
    bool is_zero() const { return words_.empty(); }
    bool coeff(std::size_t i) const;
    void set_coeff(std::size_t i, bool value);
    std::span<const std::uint64_t> words() const { return words_; }
    std::uint64_t low_word() const { return words_.empty() ? 0 : words_[0]; }

    GF2Poly shifted_left(std::size_t k) const;
    GF2Poly low_bits(std::size_t n) const;

    GF2Poly& operator+=(const GF2Poly& other);
    friend GF2Poly operator+(GF2Poly a, const GF2Poly& b) { return a += b; }
    friend GF2Poly operator*(const GF2Poly& a, const GF2Poly& b);

    bool operator==(const GF2Poly&) const = default;
    /// Orders by degree, then coefficients from the top; stable across runs.
    std::strong_ordering operator<=>(const GF2Poly& other) const;

private:
    void trim();
    std::vector<std::uint64_t> words_;
};

struct DivMod {
    GF2Poly quotient;
    GF2Poly remainder;
};

GF2Poly poly_add(const GF2Poly& a, const GF2Poly& b);
GF2Poly poly_mul(const GF2Poly& a, const GF2Poly& b);
/// Throws std::domain_error on a zero divisor.
DivMod poly_divmod(const GF2Poly& a, const GF2Poly& m);
GF2Poly poly_mod(const GF2Poly& a, const GF2Poly& m);
GF2Poly poly_mulmod(const GF2Poly& a, const GF2Poly& b, const GF2Poly& m);
/// Monic gcd. Throws std::domain_error when both inputs are zero.
GF2Poly poly_gcd(const GF2Poly& a, const GF2Poly& b);
/// X^(2^d) mod m via d squarings. Requires deg(m) >= 1.
GF2Poly pow_x2d_mod(unsigned d, const GF2Poly& m);
/// Requires deg(f) >= 1.
bool is_irreducible(const GF2Poly& f);
/// Distinct irreducible divisors of f having exactly degree d, sorted ascending.
std::vector<GF2Poly> irreducible_factors_of_degree(const GF2Poly& f, unsigned d);
/// Uniform irreducible polynomial of the given degree, by rejection sampling
/// from a seeded generator.
GF2Poly random_irreducible(unsigned degree, std::uint64_t seed);
/// Number of monic irreducible polynomials of degree d (Moebius formula).
std::uint64_t count_irreducible(unsigned d);

/// Precomputed reducer for repeated reduction modulo one fixed polynomial.
class PolyModulus {
public:
    explicit PolyModulus(const GF2Poly& m);
    const GF2Poly& poly() const { return m_; }
    int degree() const { return deg_; }
    /// Reduces a (arbitrary length, low word first) in place; the result fits
    /// in words_for_remainder() words.
    void reduce(std::vector<std::uint64_t>& a) const;
    GF2Poly mod(const GF2Poly& a) const;
    GF2Poly mulmod(const GF2Poly& a, const GF2Poly& b) const;
    GF2Poly sqrmod(const GF2Poly& a) const;

private:
    GF2Poly m_;
    int deg_;
    std::size_t nwords_;
    // shifted_[s] = m << s, s in [0, 64), padded to nwords_ + 1 words.
    std::vector<std::vector<std::uint64_t>> shifted_;
};

/// Small-degree fast path (modulus degree <= 63) used in the search loops.
struct Poly64Mod {
    std::uint64_t m;  // includes the X^deg bit
    int deg;
    std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t sqrmod(std::uint64_t a) const { return mulmod(a, a); }
    /// Reduces a 128-bit value (hi:lo).
    std::uint64_t reduce(std::uint64_t lo, std::uint64_t hi) const;
};
std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
/// Irreducibility for polynomials of degree 1..63 packed into one word.
bool is_irreducible_u64(std::uint64_t f);

// ---------------------------------------------------------------------------
// GF(2)[X]/(X^W - 1)

/// Element of the cyclic ring of width W <= 64. Multiplication by X is a
/// one-bit left rotation of the W-bit value.
struct RingElem {
    std::uint64_t value = 0;
    unsigned width = 32;

    static RingElem from_poly(const GF2Poly& p, unsigned width);
    GF2Poly to_poly() const { return GF2Poly::from_u64(value); }
    bool operator==(const RingElem&) const = default;
};

std::uint64_t ring_mask(unsigned width);
RingElem ring_add(RingElem a, RingElem b);
RingElem ring_mul(RingElem a, RingElem b);
RingElem ring_mul_x(RingElem a, unsigned k = 1);
/// Sum_{k=0}^{n-1} X^k in the ring.
RingElem ring_geometric_sum(std::uint64_t n, unsigned width);
/// Inverse when gcd(a, X^W - 1) = 1.
std::optional<RingElem> ring_inverse(RingElem a);

// ---------------------------------------------------------------------------
// Dense linear algebra

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}
    std::size_t size() const { return nbits_; }
    bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
    void set(std::size_t i, bool v);
    void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }
    std::span<std::uint64_t> words() { return words_; }
    std::span<const std::uint64_t> words() const { return words_; }
    BitVector& operator^=(const BitVector& other);
    bool any() const;
    std::size_t popcount() const;
    bool operator==(const BitVector&) const = default;

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

bool dot(const BitVector& a, const BitVector& b);

class GF2Matrix {
public:
    GF2Matrix() = default;
    GF2Matrix(std::size_t rows, std::size_t cols);
    std::size_t n_rows() const { return rows_; }
    std::size_t n_cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }
    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * wpr_ + c / 64] >> (c % 64)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v);
    void flip(std::size_t r, std::size_t c) { data_[r * wpr_ + c / 64] ^= std::uint64_t{1} << (c % 64); }
    std::span<std::uint64_t> row(std::size_t r) { return {data_.data() + r * wpr_, wpr_}; }
    std::span<const std::uint64_t> row(std::size_t r) const { return {data_.data() + r * wpr_, wpr_}; }
    /// Appends a zero row and returns its index.
    std::size_t add_row();
    BitVector multiply(const BitVector& x) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t wpr_ = 0;
    std::vector<std::uint64_t> data_;
};

struct SolveResult {
    bool consistent = false;
    BitVector particular;
    std::vector<BitVector> kernel;
    std::size_t rank = 0;
    /// When inconsistent: row combination y with y^T M = 0 and y . rhs = 1.
    BitVector certificate;
};

/// Gauss-Jordan elimination. Throws std::invalid_argument on dimension mismatch.
SolveResult gf2_solve(const GF2Matrix& m, const BitVector& rhs);

}  // namespace rollbreak
