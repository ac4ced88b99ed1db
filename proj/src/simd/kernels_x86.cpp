#include "rollbreak/simd.hpp"

#if defined(ROLLBREAK_HAVE_X86_KERNELS)

#include <immintrin.h>

#include <cstring>

namespace rollbreak::simd {
namespace {

inline __m128i clmul_pair(std::uint64_t a, std::uint64_t b) {
    __m128i va = _mm_cvtsi64_si128(static_cast<long long>(a));
    __m128i vb = _mm_cvtsi64_si128(static_cast<long long>(b));
    return _mm_clmulepi64_si128(va, vb, 0x00);
}

void clmul_x86(std::uint64_t a, std::uint64_t b, std::uint64_t* lo, std::uint64_t* hi) {
    __m128i r = clmul_pair(a, b);
    *lo = static_cast<std::uint64_t>(_mm_cvtsi128_si64(r));
    *hi = static_cast<std::uint64_t>(_mm_extract_epi64(r, 1));
}

void mul_x86(const std::uint64_t* a, std::size_t na, const std::uint64_t* b, std::size_t nb,
             std::uint64_t* out) {
    std::memset(out, 0, (na + nb) * sizeof(std::uint64_t));
    for (std::size_t i = 0; i < na; ++i) {
        if (a[i] == 0) continue;
        __m128i va = _mm_cvtsi64_si128(static_cast<long long>(a[i]));
        for (std::size_t j = 0; j < nb; ++j) {
            __m128i vb = _mm_cvtsi64_si128(static_cast<long long>(b[j]));
            __m128i r = _mm_clmulepi64_si128(va, vb, 0x00);
            __m128i acc = _mm_loadu_si128(reinterpret_cast<const __m128i*>(out + i + j));
            _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i + j), _mm_xor_si128(acc, r));
        }
    }
}

void sqr_x86(const std::uint64_t* a, std::size_t n, std::uint64_t* out) {
    for (std::size_t i = 0; i < n; ++i) {
        __m128i r = clmul_pair(a[i], a[i]);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + 2 * i), r);
    }
}

void xor_into_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
        __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(d, s));
    }
    for (; i < n; ++i) dst[i] ^= src[i];
}

constexpr Kernels kX86{"pclmul+avx2", mul_x86, sqr_x86, xor_into_avx2, clmul_x86};

}  // namespace

const Kernels* x86_kernels() {
    static const bool ok = __builtin_cpu_supports("pclmul") && __builtin_cpu_supports("avx2") &&
                           __builtin_cpu_supports("sse4.1");
    return ok ? &kX86 : nullptr;
}

}  // namespace rollbreak::simd

#else

namespace rollbreak::simd {
const Kernels* x86_kernels() { return nullptr; }
}  // namespace rollbreak::simd

#endif
