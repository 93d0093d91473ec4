#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"

namespace unlearn_audit::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(UA_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* find(std::string_view name) {
    for (const KernelTable* t : available_kernels()) {
        if (name == t->name) {
            return t;
        }
    }
    return nullptr;
}

const KernelTable* pick_default() {
    if (const char* env = std::getenv("UNLEARN_AUDIT_KERNELS")) {
        if (const KernelTable* t = find(env)) {
            return t;
        }
    }
    return available_kernels().back();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{pick_default()};
    return current;
}

}  // namespace

std::vector<const KernelTable*> available_kernels() {
    std::vector<const KernelTable*> out{&scalar_kernels()};
#if defined(UA_HAVE_AVX2_TU)
    if (cpu_has_avx2()) {
        out.push_back(&detail::avx2_kernels());
    }
#endif
#if defined(UA_HAVE_NEON_TU)
    out.push_back(&detail::neon_kernels());
#endif
    return out;
}

const KernelTable& active() {
    return *slot().load(std::memory_order_acquire);
}

bool select(std::string_view name) {
    const KernelTable* t = find(name);
    if (t == nullptr) {
        return false;
    }
    slot().store(t, std::memory_order_release);
    return true;
}

}  // namespace unlearn_audit::kernels
