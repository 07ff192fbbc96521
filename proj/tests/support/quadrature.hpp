#pragma once

// Quadrature oracles used by the tests. These stay independent of the library
// implementation paths they check.

#include <cmath>
#include <functional>
#include <vector>

namespace testsupport {

// Composite Simpson on [a, b] with n subintervals (n even).
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t n) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double acc = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i)
        acc += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// log integral of exp(logf(t)) over [a, b]; factor out the max exponent so the
// sum stays in range.
inline double log_simpson_exp(const std::function<double(double)>& logf, double a,
                              double b, std::size_t n) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    std::vector<double> vals(n + 1);
    double m = -1e308;
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = logf(a + h * static_cast<double>(i));
        if (vals[i] > m) m = vals[i];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::exp(vals[i] - m);
    }
    return m + std::log(acc * h / 3.0);
}

// log of integral over theta of N_p(x; 0, theta I) * InvGa(theta; a, b),
// integrated in t = log theta around the integrand's mode.
inline double log_iso_student_by_quadrature(double sumsq_x, std::size_t p, double a,
                                            double b) {
    const double pd = static_cast<double>(p);
    auto log_integrand = [&](double t) {
        const double inv_theta = std::exp(-t);
        // Gaussian + inverse-gamma exponents plus the log-scale Jacobian e^t.
        return -0.5 * pd * (std::log(2.0 * M_PI) + t) - 0.5 * sumsq_x * inv_theta +
               a * std::log(b) - std::lgamma(a) - (a + 1.0) * t - b * inv_theta + t;
    };
    const double mode = std::log((0.5 * sumsq_x + b) / (a + 0.5 * pd));
    return log_simpson_exp(log_integrand, mode - 60.0, mode + 60.0, 120000);
}

// CDF of InvGa(a, b) at x by direct quadrature of the density in log scale.
inline double inv_gamma_cdf_by_quadrature(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    auto log_density = [&](double t) {
        const double inv_theta = std::exp(-t);
        return a * std::log(b) - std::lgamma(a) - (a + 1.0) * t - b * inv_theta + t;
    };
    // Integrate log-theta from far below the mass down to log(x).
    const double lo = std::log(b) - 60.0;
    if (std::log(x) <= lo) return 0.0;
    return std::exp(log_simpson_exp(log_density, lo, std::log(x), 80000));
}

}  // namespace testsupport
