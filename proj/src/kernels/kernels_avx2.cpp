// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <limits>

#include "kernels_internal.hpp"

namespace unlearn_audit::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        acc += a[i];
    }
    return acc;
}

double min_avx2(const double* a, std::size_t n) {
    const double inf = std::numeric_limits<double>::infinity();
    __m256d m = _mm256_set1_pd(inf);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        m = _mm256_min_pd(m, _mm256_loadu_pd(a + i));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double r = lanes[0];
    for (int l = 1; l < 4; ++l) {
        if (lanes[l] < r) {
            r = lanes[l];
        }
    }
    for (; i < n; ++i) {
        if (a[i] < r) {
            r = a[i];
        }
    }
    return r;
}

double gather_sum_avx2(const double* row, const std::uint32_t* idx, std::size_t k) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= k; i += 4) {
        __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
        acc = _mm256_add_pd(acc, _mm256_i32gather_pd(row, vi, 8));
    }
    double r = hsum(acc);
    for (; i < k; ++i) {
        r += row[idx[i]];
    }
    return r;
}

void accumulate_avx2(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) {
        acc[i] += x[i];
    }
}

void scale_avx2(double* a, double s, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
    }
    for (; i < n; ++i) {
        a[i] *= s;
    }
}

}  // namespace

const KernelTable& avx2_kernels() {
    static const KernelTable table{
        "avx2",          dot_avx2,        sum_avx2,   min_avx2,
        gather_sum_avx2, accumulate_avx2, scale_avx2,
    };
    return table;
}

}  // namespace unlearn_audit::kernels::detail
