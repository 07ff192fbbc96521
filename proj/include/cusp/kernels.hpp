#pragma once

#include <cstddef>

// Dense inner-loop kernels shared by the samplers and diagnostics.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active backend is chosen once at startup from CPU
// capabilities and can be overridden with the CUSP_KERNELS environment
// variable ("scalar", "avx2", "auto") or set_backend(). SIMD variants may
// reassociate sums, so results can differ from scalar in the last bits;
// equivalence is tested to tolerance, and a fixed backend on a fixed machine
// is fully deterministic.
//
// Matrices are row-major. A is n x h; rows are contiguous.

namespace cusp::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);

// Returns false (and leaves the backend unchanged) if unsupported on this CPU.
bool set_backend(Backend b);
// Re-run auto-detection (honours CUSP_KERNELS).
void set_backend_auto();
Backend active_backend();

// sum_i x[i]*y[i]
double dot(const double* x, const double* y, std::size_t n);
// sum_i x[i]^2
double sumsq(const double* x, std::size_t n);
// sum_i (x[i]-y[i])^2
double sq_diff_sum(const double* x, const double* y, std::size_t n);
// y[i] += a*x[i]
void axpy(double a, const double* x, double* y, std::size_t n);
// y[h] = A^T x   (x has length n)
void gemv_t(const double* a, std::size_t n, std::size_t h, const double* x, double* y);
// y[n] = A x     (x has length h)
void gemv_n(const double* a, std::size_t n, std::size_t h, const double* x, double* y);
// C (h x h, row-major, full symmetric) = A^T A
void syrk_ata(const double* a, std::size_t n, std::size_t h, double* c);
// C = A^T diag(w) A, w has length n
void syrk_ata_weighted(const double* a, const double* w, std::size_t n, std::size_t h,
                       double* c);

// Implementation tables; selected by the dispatcher, exposed for
// backend-vs-backend equivalence tests.
struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*sq_diff_sum)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*gemv_t)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*gemv_n)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*syrk_ata)(const double*, std::size_t, std::size_t, double*);
    void (*syrk_ata_weighted)(const double*, const double*, std::size_t, std::size_t,
                              double*);
};

const KernelTable& table(Backend b);

}  // namespace cusp::kernels
