#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cusp/kernels.hpp"
#include "cusp/rng.hpp"

namespace k = cusp::kernels;

namespace {

std::vector<double> random_vec(cusp::RngStream& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * (2.0 * rng.next_double() - 1.0);
    return v;
}

// Tolerance scaled by the magnitude of the summed terms; SIMD reassociation
// and FMA change only the last few bits per accumulation.
double abs_tol(double magnitude, std::size_t n) {
    return 1e-13 * magnitude * static_cast<double>(n + 16);
}

}  // namespace

TEST_CASE("scalar kernels: small hand-checked cases") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> y = {4.0, -5.0, 6.0};
    const auto& t = k::table(k::Backend::scalar);
    CHECK(t.dot(x.data(), y.data(), 3) == doctest::Approx(12.0));
    CHECK(t.sumsq(x.data(), 3) == doctest::Approx(14.0));
    CHECK(t.sq_diff_sum(x.data(), y.data(), 3) == doctest::Approx(9.0 + 49.0 + 9.0));

    std::vector<double> z = y;
    t.axpy(2.0, x.data(), z.data(), 3);
    CHECK(z[0] == doctest::Approx(6.0));
    CHECK(z[1] == doctest::Approx(-1.0));
    CHECK(z[2] == doctest::Approx(12.0));

    // A = [[1,2],[3,4],[5,6]] (3x2)
    const std::vector<double> a = {1, 2, 3, 4, 5, 6};
    std::vector<double> out(2);
    const std::vector<double> v3 = {1, 1, 1};
    t.gemv_t(a.data(), 3, 2, v3.data(), out.data());
    CHECK(out[0] == doctest::Approx(9.0));
    CHECK(out[1] == doctest::Approx(12.0));

    std::vector<double> out3(3);
    const std::vector<double> v2 = {1, -1};
    t.gemv_n(a.data(), 3, 2, v2.data(), out3.data());
    CHECK(out3[0] == doctest::Approx(-1.0));
    CHECK(out3[1] == doctest::Approx(-1.0));
    CHECK(out3[2] == doctest::Approx(-1.0));

    std::vector<double> c(4);
    t.syrk_ata(a.data(), 3, 2, c.data());
    CHECK(c[0] == doctest::Approx(35.0));   // 1+9+25
    CHECK(c[1] == doctest::Approx(44.0));   // 2+12+30
    CHECK(c[2] == doctest::Approx(44.0));
    CHECK(c[3] == doctest::Approx(56.0));   // 4+16+36

    const std::vector<double> w = {2, 0, 1};
    t.syrk_ata_weighted(a.data(), w.data(), 3, 2, c.data());
    CHECK(c[0] == doctest::Approx(2.0 + 25.0));
    CHECK(c[1] == doctest::Approx(4.0 + 30.0));
    CHECK(c[3] == doctest::Approx(8.0 + 36.0));
}

TEST_CASE("kernel backends agree to rounding tolerance") {
    if (!k::backend_supported(k::Backend::avx2)) {
        MESSAGE("avx2 backend not available on this CPU; skipping equivalence");
        return;
    }
    const auto& s = k::table(k::Backend::scalar);
    const auto& v = k::table(k::Backend::avx2);
    cusp::RngStream rng(20240901);

    const std::size_t sizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17,
                                 31, 64, 100, 255, 1024, 3001};
    for (std::size_t n : sizes) {
        const auto x = random_vec(rng, n, 3.0);
        const auto y = random_vec(rng, n, 2.0);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::fabs(x[i] * y[i]);

        CHECK(std::fabs(s.dot(x.data(), y.data(), n) - v.dot(x.data(), y.data(), n)) <=
              abs_tol(mag + 1.0, n));
        CHECK(std::fabs(s.sumsq(x.data(), n) - v.sumsq(x.data(), n)) <=
              abs_tol(mag + 1.0, n));
        CHECK(std::fabs(s.sq_diff_sum(x.data(), y.data(), n) -
                        v.sq_diff_sum(x.data(), y.data(), n)) <= abs_tol(mag + 1.0, n));

        auto z1 = y, z2 = y;
        s.axpy(1.7, x.data(), z1.data(), n);
        v.axpy(1.7, x.data(), z2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::fabs(z1[i] - z2[i]) <= 1e-12);
    }

    // Matrix kernels across shapes, including ragged tails.
    for (std::size_t n : {1u, 2u, 5u, 17u, 64u}) {
        for (std::size_t h : {1u, 2u, 3u, 4u, 7u, 8u, 13u, 33u}) {
            const auto a = random_vec(rng, n * h, 1.5);
            const auto xr = random_vec(rng, n);
            const auto xc = random_vec(rng, h);
            const auto w = random_vec(rng, n, 1.0);

            std::vector<double> y1(h), y2(h);
            s.gemv_t(a.data(), n, h, xr.data(), y1.data());
            v.gemv_t(a.data(), n, h, xr.data(), y2.data());
            for (std::size_t i = 0; i < h; ++i)
                CHECK(std::fabs(y1[i] - y2[i]) <= abs_tol(10.0, n));

            std::vector<double> r1(n), r2(n);
            s.gemv_n(a.data(), n, h, xc.data(), r1.data());
            v.gemv_n(a.data(), n, h, xc.data(), r2.data());
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::fabs(r1[i] - r2[i]) <= abs_tol(10.0, h));

            std::vector<double> c1(h * h), c2(h * h);
            s.syrk_ata(a.data(), n, h, c1.data());
            v.syrk_ata(a.data(), n, h, c2.data());
            for (std::size_t i = 0; i < h * h; ++i)
                CHECK(std::fabs(c1[i] - c2[i]) <= abs_tol(10.0, n));

            s.syrk_ata_weighted(a.data(), w.data(), n, h, c1.data());
            v.syrk_ata_weighted(a.data(), w.data(), n, h, c2.data());
            for (std::size_t i = 0; i < h * h; ++i)
                CHECK(std::fabs(c1[i] - c2[i]) <= abs_tol(10.0, n));
        }
    }
}

TEST_CASE("syrk results are symmetric") {
    cusp::RngStream rng(7);
    for (k::Backend b : {k::Backend::scalar, k::Backend::avx2}) {
        if (!k::backend_supported(b)) continue;
        const auto& t = k::table(b);
        const std::size_t n = 23, h = 9;
        const auto a = random_vec(rng, n * h);
        std::vector<double> c(h * h);
        t.syrk_ata(a.data(), n, h, c.data());
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t q = 0; q < h; ++q)
                CHECK(c[r * h + q] == c[q * h + r]);
    }
}

TEST_CASE("backend selection") {
    const k::Backend original = k::active_backend();
    CHECK(k::set_backend(k::Backend::scalar));
    CHECK(k::active_backend() == k::Backend::scalar);
    if (k::backend_supported(k::Backend::avx2)) {
        CHECK(k::set_backend(k::Backend::avx2));
        CHECK(k::active_backend() == k::Backend::avx2);
    }
    k::set_backend(original);
}
