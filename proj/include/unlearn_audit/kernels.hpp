#pragma once

// Data-parallel inner loops shared by the probes. Each kernel has a scalar
// reference implementation and optional SIMD variants; one table is picked
// at startup from the CPU's capabilities. The SIMD variants are checked
// against the scalar reference in tests/test_kernels.cpp.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace unlearn_audit::kernels {

struct KernelTable {
    const char* name;
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i a[i]
    double (*sum)(const double* a, std::size_t n);
    // min_i a[i]; +inf for n == 0
    double (*min)(const double* a, std::size_t n);
    // sum_k row[idx[k]]; indices are trusted (callers bounds-check)
    double (*gather_sum)(const double* row, const std::uint32_t* idx, std::size_t k);
    // acc[i] += x[i]
    void (*accumulate)(double* acc, const double* x, std::size_t n);
    // a[i] *= s
    void (*scale)(double* a, double s, std::size_t n);
};

const KernelTable& scalar_kernels();

// Every table usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

// Table chosen at first use: the widest supported variant, unless the
// UNLEARN_AUDIT_KERNELS environment variable names another one ("scalar",
// "avx2", "neon").
const KernelTable& active();

// Overrides the active table (tests and benchmarking). Returns false if the
// name is not available on this machine.
bool select(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline double squared_norm(std::span<const double> a) {
    return active().dot(a.data(), a.data(), a.size());
}

inline double sum(std::span<const double> a) {
    return active().sum(a.data(), a.size());
}

inline double min(std::span<const double> a) {
    return active().min(a.data(), a.size());
}

inline double gather_sum(std::span<const double> row, std::span<const std::uint32_t> idx) {
    return active().gather_sum(row.data(), idx.data(), idx.size());
}

inline void accumulate(std::span<double> acc, std::span<const double> x) {
    active().accumulate(acc.data(), x.data(), acc.size());
}

inline void scale(std::span<double> a, double s) {
    active().scale(a.data(), s, a.size());
}

}  // namespace unlearn_audit::kernels
