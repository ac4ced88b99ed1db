#include <atomic>

#include "rollbreak/simd.hpp"

namespace rollbreak::simd {
namespace {

const Kernels* best() {
    if (const Kernels* k = x86_kernels()) return k;
    return &scalar_kernels();
}

std::atomic<const Kernels*> g_active{nullptr};

}  // namespace

const Kernels& active() {
    const Kernels* k = g_active.load(std::memory_order_acquire);
    if (k == nullptr) {
        k = best();
        g_active.store(k, std::memory_order_release);
    }
    return *k;
}

void force_scalar(bool on) {
    g_active.store(on ? &scalar_kernels() : best(), std::memory_order_release);
}

}  // namespace rollbreak::simd
