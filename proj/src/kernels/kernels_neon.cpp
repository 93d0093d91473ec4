#include <arm_neon.h>

#include <limits>

#include "kernels_internal.hpp"

namespace unlearn_audit::kernels::detail {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double sum_neon(const double* a, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(a + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(a + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        acc += a[i];
    }
    return acc;
}

double min_neon(const double* a, std::size_t n) {
    float64x2_t m = vdupq_n_f64(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        m = vminq_f64(m, vld1q_f64(a + i));
    }
    double r = vminvq_f64(m);
    for (; i < n; ++i) {
        if (a[i] < r) {
            r = a[i];
        }
    }
    return r;
}

// NEON has no gather; unrolled scalar loads into two lanes.
double gather_sum_neon(const double* row, const std::uint32_t* idx, std::size_t k) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= k; i += 2) {
        const double pair[2] = {row[idx[i]], row[idx[i + 1]]};
        acc = vaddq_f64(acc, vld1q_f64(pair));
    }
    double r = vaddvq_f64(acc);
    for (; i < k; ++i) {
        r += row[idx[i]];
    }
    return r;
}

void accumulate_neon(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vld1q_f64(x + i)));
    }
    for (; i < n; ++i) {
        acc[i] += x[i];
    }
}

void scale_neon(double* a, double s, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(a + i, vmulq_n_f64(vld1q_f64(a + i), s));
    }
    for (; i < n; ++i) {
        a[i] *= s;
    }
}

}  // namespace

const KernelTable& neon_kernels() {
    static const KernelTable table{
        "neon",          dot_neon,        sum_neon,   min_neon,
        gather_sum_neon, accumulate_neon, scale_neon,
    };
    return table;
}

}  // namespace unlearn_audit::kernels::detail
