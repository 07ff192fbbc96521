// AVX2+FMA kernel backend. This translation unit is compiled with
// -mavx2 -mfma; it must only be entered after the dispatcher has checked CPU
// support. Tails shorter than a vector are handled scalar.

#include "cusp/kernels.hpp"

#if defined(CUSP_HAVE_AVX2_BACKEND)

#include <immintrin.h>

#include <cstring>

namespace cusp::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4),
                               acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sumsq_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d a = _mm256_loadu_pd(x + i);
        const __m256d b = _mm256_loadu_pd(x + i + 4);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double sq_diff_sum_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                          _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void gemv_t_avx2(const double* a, std::size_t n, std::size_t h, const double* x,
                 double* y) {
    std::memset(y, 0, h * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) axpy_avx2(x[i], a + i * h, y, h);
}

void gemv_n_avx2(const double* a, std::size_t n, std::size_t h, const double* x,
                 double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = dot_avx2(a + i * h, x, h);
}

void syrk_ata_avx2(const double* a, std::size_t n, std::size_t h, double* c) {
    std::memset(c, 0, h * h * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * h;
        for (std::size_t r = 0; r < h; ++r)
            axpy_avx2(row[r], row + r, c + r * h + r, h - r);
    }
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t q = 0; q < r; ++q) c[r * h + q] = c[q * h + r];
}

void syrk_ata_weighted_avx2(const double* a, const double* w, std::size_t n,
                            std::size_t h, double* c) {
    std::memset(c, 0, h * h * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * h;
        const double wi = w[i];
        for (std::size_t r = 0; r < h; ++r)
            axpy_avx2(wi * row[r], row + r, c + r * h + r, h - r);
    }
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t q = 0; q < r; ++q) c[r * h + q] = c[q * h + r];
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t = {dot_avx2,    sumsq_avx2,  sq_diff_sum_avx2,
                                  axpy_avx2,   gemv_t_avx2, gemv_n_avx2,
                                  syrk_ata_avx2, syrk_ata_weighted_avx2};
    return t;
}

}  // namespace cusp::kernels

#endif  // CUSP_HAVE_AVX2_BACKEND
