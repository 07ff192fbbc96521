#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cusp/diagnostics.hpp"
#include "cusp/distributions.hpp"
#include "cusp/errors.hpp"
#include "cusp/rng.hpp"

using namespace cusp;

namespace {

DrawStore store_from_draws(std::size_t p, std::vector<std::vector<double>> draws) {
    DrawStore s;
    s.p = p;
    for (std::size_t d = 0; d < draws.size(); ++d)
        s.append(std::move(draws[d]), 0, static_cast<int>(p) + 1,
                 static_cast<std::uint64_t>(d + 1));
    return s;
}

std::vector<double> ar1_trace(std::size_t n, double rho, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> x(n);
    x[0] = prob::sample_std_normal(rng);
    const double innov = std::sqrt(1.0 - rho * rho);
    for (std::size_t t = 1; t < n; ++t)
        x[t] = rho * x[t - 1] + innov * prob::sample_std_normal(rng);
    return x;
}

}  // namespace

TEST_CASE("posterior_mse: exact cases and the bias-variance identity") {
    Matrix omega0(1, 1);
    omega0(0, 0) = 1.0;

    CHECK(diag::posterior_mse(store_from_draws(1, {{1.0}, {1.0}}), omega0) == 0.0);
    CHECK(diag::posterior_mse(store_from_draws(1, {{2.0}}), omega0) == 1.0);

    // Random 3x3 store: MSE equals bias^2 + (biased) variance assembled per
    // entry.
    RngStream rng(50);
    const std::size_t p = 3, t = 40;
    std::vector<std::vector<double>> draws(t, std::vector<double>(upper_size(p)));
    for (auto& d : draws)
        for (auto& v : d) v = 2.0 * prob::sample_std_normal(rng);
    Matrix ref(p, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t q = j; q < p; ++q) {
            ref(j, q) = prob::sample_std_normal(rng);
            ref(q, j) = ref(j, q);
        }
    const DrawStore store = store_from_draws(p, draws);
    const double mse = diag::posterior_mse(store, ref);

    double alt = 0.0;
    for (std::size_t e = 0; e < upper_size(p); ++e) {
        double mean = 0.0;
        for (std::size_t d = 0; d < t; ++d) mean += draws[d][e];
        mean /= static_cast<double>(t);
        double var = 0.0;
        for (std::size_t d = 0; d < t; ++d)
            var += (draws[d][e] - mean) * (draws[d][e] - mean);
        var /= static_cast<double>(t);
        std::size_t j = 0, q = 0, k = e;
        for (j = 0; j < p; ++j) {
            if (k < p - j) {
                q = j + k;
                break;
            }
            k -= p - j;
        }
        const double bias = mean - ref(j, q);
        alt += bias * bias + var;
    }
    alt /= static_cast<double>(upper_size(p));
    CHECK(mse == doctest::Approx(alt).epsilon(1e-10));

    // Order invariance.
    std::vector<std::vector<double>> shuffled = draws;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[0], shuffled[t / 2]);
    CHECK(diag::posterior_mse(store_from_draws(p, shuffled), ref) ==
          doctest::Approx(mse).epsilon(1e-12));

    Matrix wrong(2, 2);
    CHECK_THROWS_AS(diag::posterior_mse(store, wrong), ShapeError);
}

TEST_CASE("ess: iid, AR(1), degenerate inputs") {
    RngStream rng(51);
    std::vector<double> iid(10000);
    for (auto& v : iid) v = prob::sample_std_normal(rng);
    const double ess_iid = diag::ess(iid);
    CHECK(ess_iid > 8500.0);
    CHECK(ess_iid <= 10000.0);

    const std::vector<double> ar = ar1_trace(100000, 0.5, 52);
    const double ess_ar = diag::ess(ar);
    const double target = 100000.0 / 3.0;
    CHECK(std::fabs(ess_ar - target) / target < 0.15);

    const std::vector<double> constant(100, 3.0);
    CHECK_THROWS_AS(diag::ess(constant), DegenerateDistributionError);
    const std::vector<double> tiny = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(diag::ess(tiny), DomainError);
}

TEST_CASE("ess: thinning a positively autocorrelated chain cannot add information") {
    for (std::uint64_t seed : {60u, 61u, 62u, 63u, 64u}) {
        const std::vector<double> full = ar1_trace(50000, 0.9, seed);
        std::vector<double> thinned;
        for (std::size_t i = 0; i < full.size(); i += 5) thinned.push_back(full[i]);
        const double ess_full = diag::ess(full);
        const double ess_thin = diag::ess(thinned);
        // Estimator noise margin ~ 3 SE of the ESS estimate on these fixtures.
        CHECK(ess_thin <= ess_full + 0.12 * ess_full + 50.0);
    }
}

TEST_CASE("averaged_ess: iid draws and the single-entry reduction") {
    RngStream rng(53);
    const std::size_t t = 3000;
    std::vector<std::vector<double>> draws(t, std::vector<double>(3));
    for (auto& d : draws)
        for (auto& v : d) v = prob::sample_std_normal(rng);
    const DrawStore store2 = store_from_draws(2, draws);
    const double avg = diag::averaged_ess(store2);
    CHECK(std::fabs(avg - static_cast<double>(t)) / static_cast<double>(t) < 0.15);
    CHECK(avg > 0.0);
    CHECK(avg <= static_cast<double>(t));

    std::vector<std::vector<double>> single(t, std::vector<double>(1));
    std::vector<double> trace(t);
    for (std::size_t d = 0; d < t; ++d) {
        single[d][0] = prob::sample_std_normal(rng);
        trace[d] = single[d][0];
    }
    const DrawStore store1 = store_from_draws(1, single);
    CHECK(diag::averaged_ess(store1) == diag::ess(trace));
}

TEST_CASE("credible_interval: constants, the 1..100 fixture, ordering") {
    const std::vector<double> constant(7, 4.2);
    const auto [clo, chi] = diag::credible_interval(constant, 0.95);
    CHECK(clo == 4.2);
    CHECK(chi == 4.2);

    std::vector<double> ramp(100);
    std::iota(ramp.begin(), ramp.end(), 1.0);
    const auto [lo, hi] = diag::credible_interval(ramp, 0.95);
    CHECK(lo == doctest::Approx(3.475).epsilon(1e-12));
    CHECK(hi == doctest::Approx(97.525).epsilon(1e-12));

    RngStream rng(54);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> x(25);
        for (auto& v : x) v = prob::sample_std_normal(rng);
        const double level = 0.5 + 0.49 * rng.next_double();
        const auto [a, b] = diag::credible_interval(x, level);
        CHECK(a <= b);
    }

    CHECK_THROWS_AS(diag::credible_interval(std::vector<double>{}, 0.95), DomainError);
    CHECK_THROWS_AS(diag::credible_interval(ramp, 1.0), DomainError);
}

TEST_CASE("correlation_transform: fixed points, scaling, domain checks") {
    Matrix d(3, 3);
    d(0, 0) = 2.0;
    d(1, 1) = 5.0;
    d(2, 2) = 0.3;
    const Matrix eye = diag::correlation_transform(d);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t q = 0; q < 3; ++q)
            CHECK(eye(j, q) == doctest::Approx(j == q ? 1.0 : 0.0));

    Matrix m(2, 2);
    m(0, 0) = 4.0;
    m(1, 1) = 9.0;
    m(0, 1) = m(1, 0) = 3.0;
    const Matrix corr = diag::correlation_transform(m);
    CHECK(corr(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(corr(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

    // Idempotent on correlation matrices; random PSD inputs stay in range.
    const Matrix twice = diag::correlation_transform(corr);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t q = 0; q < 2; ++q)
            CHECK(twice(j, q) == doctest::Approx(corr(j, q)).epsilon(1e-12));

    RngStream rng(55);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t p = 4;
        Matrix b(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                b(i, j) = prob::sample_std_normal(rng);
        Matrix psd(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                double acc = (i == j) ? 0.1 : 0.0;
                for (std::size_t k = 0; k < p; ++k) acc += b(i, k) * b(j, k);
                psd(i, j) = acc;
            }
        const Matrix r = diag::correlation_transform(psd);
        for (std::size_t i = 0; i < p; ++i) {
            CHECK(std::fabs(r(i, i) - 1.0) <= 1e-12);
            for (std::size_t j = 0; j < p; ++j) {
                CHECK(r(i, j) <= 1.0 + 1e-10);
                CHECK(r(i, j) >= -1.0 - 1e-10);
            }
        }
    }

    Matrix bad(2, 2);
    bad(0, 0) = 1.0;
    bad(1, 1) = 0.0;
    CHECK_THROWS_AS(diag::correlation_transform(bad), DomainError);
}

TEST_CASE("mean_sq_dev_from_sample_corr: exact zeros and a brute-force fixture") {
    // Draws already equal to the reference correlation.
    Matrix s2(2, 2);
    s2(0, 0) = s2(1, 1) = 1.0;
    s2(0, 1) = s2(1, 0) = 0.25;
    const DrawStore equal = store_from_draws(
        2, {{4.0, 0.5, 1.0}, {4.0, 0.5, 1.0}});  // corr = 0.25 in both draws
    CHECK(diag::mean_sq_dev_from_sample_corr(equal, s2) ==
          doctest::Approx(0.0).epsilon(1e-15));

    // Scalar case: both sides are identically one.
    Matrix s1(1, 1);
    s1(0, 0) = 1.0;
    const DrawStore scalar = store_from_draws(1, {{2.0}, {7.0}, {0.4}});
    CHECK(diag::mean_sq_dev_from_sample_corr(scalar, s1) == 0.0);

    // 3x3, five draws: brute-force double loop in the test.
    RngStream rng(56);
    const std::size_t p = 3, t = 5;
    std::vector<std::vector<double>> draws(t, std::vector<double>(upper_size(p)));
    for (auto& d : draws) {
        Matrix b(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) b(i, j) = prob::sample_std_normal(rng);
        std::size_t k = 0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i; j < p; ++j) {
                double acc = (i == j) ? 0.5 : 0.0;
                for (std::size_t l = 0; l < p; ++l) acc += b(i, l) * b(j, l);
                d[k++] = acc;
            }
    }
    Matrix sref(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        sref(i, i) = 1.0;
        for (std::size_t j = i + 1; j < p; ++j) {
            sref(i, j) = 0.3 / static_cast<double>(i + j);
            sref(j, i) = sref(i, j);
        }
    }
    const DrawStore store = store_from_draws(p, draws);
    const double impl = diag::mean_sq_dev_from_sample_corr(store, sref);

    double brute = 0.0;
    for (std::size_t d = 0; d < t; ++d) {
        Matrix omega(p, p);
        std::size_t k = 0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i; j < p; ++j) {
                omega(i, j) = draws[d][k];
                omega(j, i) = draws[d][k];
                ++k;
            }
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i; j < p; ++j) {
                const double r = omega(i, j) / std::sqrt(omega(i, i) * omega(j, j));
                brute += (r - sref(i, j)) * (r - sref(i, j));
            }
    }
    brute /= static_cast<double>(t) * static_cast<double>(upper_size(p));
    CHECK(impl == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("sample_correlation and posterior means") {
    // Perfectly anticorrelated pair.
    Matrix y(4, 2);
    const double xs[4] = {1.0, 2.0, 3.0, 4.0};
    for (std::size_t i = 0; i < 4; ++i) {
        y(i, 0) = xs[i];
        y(i, 1) = -2.0 * xs[i] + 1.0;
    }
    const Matrix s = diag::sample_correlation(y);
    CHECK(s(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(s(0, 0) == doctest::Approx(1.0));

    const DrawStore store = store_from_draws(2, {{4.0, 2.0, 4.0}, {2.0, 0.0, 2.0}});
    const Matrix mean_omega = diag::posterior_mean_omega(store);
    CHECK(mean_omega(0, 0) == doctest::Approx(3.0));
    CHECK(mean_omega(0, 1) == doctest::Approx(1.0));
    CHECK(mean_omega(1, 0) == doctest::Approx(1.0));

    const Matrix mean_corr = diag::posterior_mean_correlation(store);
    // Draw 1: corr = 2/4 = 0.5; draw 2: corr = 0; average 0.25.
    CHECK(mean_corr(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(mean_corr(0, 0) == doctest::Approx(1.0));
}
