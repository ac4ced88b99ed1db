#include <bit>
#include <stdexcept>

#include "rollbreak/gf2.hpp"
#include "rollbreak/simd.hpp"

namespace rollbreak {

void BitVector::set(std::size_t i, bool v) {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    words_[i / 64] = v ? (words_[i / 64] | bit) : (words_[i / 64] & ~bit);
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if (other.nbits_ != nbits_) throw std::invalid_argument("bit vector size mismatch");
    simd::active().xor_into(words_.data(), other.words_.data(), words_.size());
    return *this;
}

bool BitVector::any() const {
    for (auto w : words_) {
        if (w) return true;
    }
    return false;
}

std::size_t BitVector::popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

bool dot(const BitVector& a, const BitVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("bit vector size mismatch");
    unsigned parity = 0;
    auto wa = a.words();
    auto wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i) parity ^= static_cast<unsigned>(std::popcount(wa[i] & wb[i]));
    return parity & 1u;
}

GF2Matrix::GF2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), data_(rows * wpr_, 0) {}

void GF2Matrix::set(std::size_t r, std::size_t c, bool v) {
    std::uint64_t& w = data_[r * wpr_ + c / 64];
    const std::uint64_t bit = std::uint64_t{1} << (c % 64);
    w = v ? (w | bit) : (w & ~bit);
}

std::size_t GF2Matrix::add_row() {
    data_.resize(data_.size() + wpr_, 0);
    return rows_++;
}

BitVector GF2Matrix::multiply(const BitVector& x) const {
    if (x.size() != cols_) throw std::invalid_argument("matrix/vector dimension mismatch");
    BitVector out(rows_);
    auto xw = x.words();
    for (std::size_t r = 0; r < rows_; ++r) {
        unsigned parity = 0;
        const std::uint64_t* rw = data_.data() + r * wpr_;
        for (std::size_t i = 0; i < wpr_; ++i) parity ^= static_cast<unsigned>(std::popcount(rw[i] & xw[i]));
        out.set(r, parity & 1u);
    }
    return out;
}

namespace {

// Gauss-Jordan over the first `ncols` columns of `aug`; trailing columns ride along.
void eliminate(GF2Matrix& aug, std::size_t ncols, std::vector<std::size_t>& pivots) {
    const auto& k = simd::active();
    const std::size_t rows = aug.n_rows();
    const std::size_t wpr = aug.words_per_row();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < ncols && rank < rows; ++c) {
        std::size_t p = rank;
        while (p < rows && !aug.get(p, c)) ++p;
        if (p == rows) continue;
        if (p != rank) {
            auto a = aug.row(p);
            auto b = aug.row(rank);
            std::swap_ranges(a.begin(), a.end(), b.begin());
        }
        const std::size_t w0 = c / 64;
        const std::uint64_t* prow = aug.row(rank).data();
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != rank && aug.get(r, c)) k.xor_into(aug.row(r).data() + w0, prow + w0, wpr - w0);
        }
        pivots.push_back(c);
        ++rank;
    }
}

}  // namespace

SolveResult gf2_solve(const GF2Matrix& m, const BitVector& rhs) {
    if (rhs.size() != m.n_rows()) throw std::invalid_argument("gf2_solve: rhs length != row count");
    const std::size_t rows = m.n_rows();
    const std::size_t cols = m.n_cols();

    GF2Matrix aug(rows, cols + 1);
    for (std::size_t r = 0; r < rows; ++r) {
        auto src = m.row(r);
        auto dst = aug.row(r);
        std::copy(src.begin(), src.end(), dst.begin());
        if (rhs.get(r)) aug.set(r, cols, true);
    }
    std::vector<std::size_t> pivots;
    eliminate(aug, cols, pivots);
    const std::size_t rank = pivots.size();

    SolveResult res;
    res.rank = rank;
    res.consistent = true;
    for (std::size_t r = rank; r < rows; ++r) {
        if (aug.get(r, cols)) {
            res.consistent = false;
            break;
        }
    }

    if (!res.consistent) {
        // Redo with the row-combination identity attached to extract a certificate.
        GF2Matrix cert(rows, cols + 1 + rows);
        for (std::size_t r = 0; r < rows; ++r) {
            auto mr = m.row(r);
            std::copy(mr.begin(), mr.end(), cert.row(r).begin());
            if (rhs.get(r)) cert.set(r, cols, true);
            cert.set(r, cols + 1 + r, true);
        }
        std::vector<std::size_t> cp;
        eliminate(cert, cols, cp);
        for (std::size_t r = cp.size(); r < rows; ++r) {
            if (!cert.get(r, cols)) continue;
            res.certificate = BitVector(rows);
            for (std::size_t i = 0; i < rows; ++i) res.certificate.set(i, cert.get(r, cols + 1 + i));
            break;
        }
        return res;
    }

    res.particular = BitVector(cols);
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t i = 0; i < rank; ++i) {
        is_pivot[pivots[i]] = true;
        if (aug.get(i, cols)) res.particular.set(pivots[i], true);
    }
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        BitVector v(cols);
        v.set(f, true);
        for (std::size_t i = 0; i < rank; ++i) {
            if (aug.get(i, f)) v.set(pivots[i], true);
        }
        res.kernel.push_back(std::move(v));
    }
    return res;
}

}  // namespace rollbreak
