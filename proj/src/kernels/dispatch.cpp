#include "cusp/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace cusp::kernels {

const KernelTable& scalar_table();
#if defined(CUSP_HAVE_AVX2_BACKEND)
const KernelTable& avx2_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(CUSP_HAVE_AVX2_BACKEND) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Dispatch {
    Backend backend;
    const KernelTable* tab;
};

Backend detect_backend() {
    if (const char* env = std::getenv("CUSP_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
        // "auto" and unrecognized values fall through to detection
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Dispatch& dispatch() {
    static Dispatch d = {detect_backend(), nullptr};
    if (d.tab == nullptr) {
#if defined(CUSP_HAVE_AVX2_BACKEND)
        d.tab = (d.backend == Backend::avx2) ? &avx2_table() : &scalar_table();
#else
        d.tab = &scalar_table();
#endif
    }
    return d;
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

bool backend_supported(Backend b) {
    if (b == Backend::scalar) return true;
    return cpu_has_avx2();
}

bool set_backend(Backend b) {
    if (!backend_supported(b)) return false;
    Dispatch& d = dispatch();
    d.backend = b;
#if defined(CUSP_HAVE_AVX2_BACKEND)
    d.tab = (b == Backend::avx2) ? &avx2_table() : &scalar_table();
#else
    d.tab = &scalar_table();
#endif
    return true;
}

void set_backend_auto() { set_backend(detect_backend()); }

Backend active_backend() { return dispatch().backend; }

const KernelTable& table(Backend b) {
#if defined(CUSP_HAVE_AVX2_BACKEND)
    if (b == Backend::avx2 && backend_supported(Backend::avx2)) return avx2_table();
#endif
    return scalar_table();
}

double dot(const double* x, const double* y, std::size_t n) {
    return dispatch().tab->dot(x, y, n);
}
double sumsq(const double* x, std::size_t n) { return dispatch().tab->sumsq(x, n); }
double sq_diff_sum(const double* x, const double* y, std::size_t n) {
    return dispatch().tab->sq_diff_sum(x, y, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
    dispatch().tab->axpy(a, x, y, n);
}
void gemv_t(const double* a, std::size_t n, std::size_t h, const double* x, double* y) {
    dispatch().tab->gemv_t(a, n, h, x, y);
}
void gemv_n(const double* a, std::size_t n, std::size_t h, const double* x, double* y) {
    dispatch().tab->gemv_n(a, n, h, x, y);
}
void syrk_ata(const double* a, std::size_t n, std::size_t h, double* c) {
    dispatch().tab->syrk_ata(a, n, h, c);
}
void syrk_ata_weighted(const double* a, const double* w, std::size_t n, std::size_t h,
                       double* c) {
    dispatch().tab->syrk_ata_weighted(a, w, n, h, c);
}

}  // namespace cusp::kernels
