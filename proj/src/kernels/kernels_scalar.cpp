#include <limits>

#include "unlearn_audit/kernels.hpp"

namespace unlearn_audit::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i];
    }
    return acc;
}

double min_scalar(const double* a, std::size_t n) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < m) {
            m = a[i];
        }
    }
    return m;
}

double gather_sum_scalar(const double* row, const std::uint32_t* idx, std::size_t k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        acc += row[idx[i]];
    }
    return acc;
}

void accumulate_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] += x[i];
    }
}

void scale_scalar(double* a, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        a[i] *= s;
    }
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        "scalar",          dot_scalar,        sum_scalar,   min_scalar,
        gather_sum_scalar, accumulate_scalar, scale_scalar,
    };
    return table;
}

}  // namespace unlearn_audit::kernels
