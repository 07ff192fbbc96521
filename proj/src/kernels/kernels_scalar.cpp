#include "cusp/kernels.hpp"

#include <cstring>

namespace cusp::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sumsq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double sq_diff_sum_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemv_t_scalar(const double* a, std::size_t n, std::size_t h, const double* x,
                   double* y) {
    for (std::size_t c = 0; c < h; ++c) y[c] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * h;
        const double xi = x[i];
        for (std::size_t c = 0; c < h; ++c) y[c] += xi * row[c];
    }
}

void gemv_n_scalar(const double* a, std::size_t n, std::size_t h, const double* x,
                   double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = dot_scalar(a + i * h, x, h);
}

// Accumulate the upper triangle row by row, then mirror.
void syrk_ata_scalar(const double* a, std::size_t n, std::size_t h, double* c) {
    std::memset(c, 0, h * h * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * h;
        for (std::size_t r = 0; r < h; ++r) {
            const double v = row[r];
            double* crow = c + r * h;
            for (std::size_t q = r; q < h; ++q) crow[q] += v * row[q];
        }
    }
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t q = 0; q < r; ++q) c[r * h + q] = c[q * h + r];
}

void syrk_ata_weighted_scalar(const double* a, const double* w, std::size_t n,
                              std::size_t h, double* c) {
    std::memset(c, 0, h * h * sizeof(double));
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a + i * h;
        const double wi = w[i];
        for (std::size_t r = 0; r < h; ++r) {
            const double v = wi * row[r];
            double* crow = c + r * h;
            for (std::size_t q = r; q < h; ++q) crow[q] += v * row[q];
        }
    }
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t q = 0; q < r; ++q) c[r * h + q] = c[q * h + r];
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t = {dot_scalar,    sumsq_scalar,  sq_diff_sum_scalar,
                                  axpy_scalar,   gemv_t_scalar, gemv_n_scalar,
                                  syrk_ata_scalar, syrk_ata_weighted_scalar};
    return t;
}

}  // namespace cusp::kernels
