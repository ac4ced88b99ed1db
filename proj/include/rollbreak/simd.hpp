#pragma once
// Bit-packed GF(2) inner loops.
//
// Every kernel has a portable scalar reference implementation. On x86-64 a
// PCLMULQDQ/AVX2 variant is compiled into a separate translation unit and
// picked at runtime when the CPU advertises the features. Both variants are
// bit-identical by contract; tests/simd_equivalence_test.cpp holds them to it.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace rollbreak::simd {

struct Kernels {
    std::string_view name;
    /// out[0 .. na+nb) = a * b over GF(2)[X]; out must not alias a or b.
    void (*mul)(const std::uint64_t* a, std::size_t na, const std::uint64_t* b, std::size_t nb,
                std::uint64_t* out);
    /// out[0 .. 2n) = a * a.
    void (*sqr)(const std::uint64_t* a, std::size_t n, std::uint64_t* out);
    /// dst[i] ^= src[i] for i < n.
    void (*xor_into)(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
    /// 128-bit carry-less product of two words, returned as (lo, hi).
    void (*clmul)(std::uint64_t a, std::uint64_t b, std::uint64_t* lo, std::uint64_t* hi);
};

const Kernels& scalar_kernels();

/// nullptr when the CPU or the build lacks the extensions.
const Kernels* x86_kernels();

/// The table used by all library code. Defaults to the best available.
const Kernels& active();

/// Pin the scalar reference path (tests, benchmarking). Not thread-safe with
/// respect to concurrent kernel use; call before spawning workers.
void force_scalar(bool on);

}  // namespace rollbreak::simd
