#include "cusp/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "cusp/errors.hpp"
#include "cusp/kernels.hpp"

namespace cusp::diag {

double posterior_mse(const DrawStore& draws, const Matrix& omega0) {
    const std::size_t p = draws.p;
    if (omega0.rows() != p || omega0.cols() != p)
        throw ShapeError("posterior_mse: reference matrix dimension mismatch");
    if (draws.size() == 0) throw DomainError("posterior_mse: empty draw store");

    std::vector<double> ref(upper_size(p));
    std::size_t k = 0;
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t q = j; q < p; ++q) ref[k++] = omega0(j, q);

    double acc = 0.0;
    for (const auto& draw : draws.omega_upper)
        acc += kernels::sq_diff_sum(draw.data(), ref.data(), ref.size());
    return acc / (static_cast<double>(draws.size()) * static_cast<double>(ref.size()));
}

double ess(std::span<const double> trace) {
    const std::size_t n = trace.size();
    if (n < 10) throw DomainError("ess: need at least 10 values");

    double mean = 0.0;
    for (double v : trace) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = trace[i] - mean;

    const double gamma0 = kernels::sumsq(c.data(), n) / static_cast<double>(n);
    if (!(gamma0 > 0.0))
        throw DegenerateDistributionError("ess: undefined for a constant trace");

    auto gamma_at = [&](std::size_t lag) {
        return kernels::dot(c.data(), c.data() + lag, n - lag) / static_cast<double>(n);
    };

    // Geyer: sum paired autocovariances Gamma_m = gamma_2m + gamma_{2m+1} while
    // positive, enforcing monotone non-increase.
    double pair_sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; 2 * m + 1 < n - 1; ++m) {
        double g = gamma_at(2 * m) + gamma_at(2 * m + 1);
        if (g <= 0.0) break;
        g = std::min(g, prev);
        pair_sum += g;
        prev = g;
    }

    const double tau = 2.0 * pair_sum / gamma0 - 1.0;
    const double N = static_cast<double>(n);
    if (!(tau > 0.0)) return N;  // extreme antithetic correlation; clip to N
    return std::min(N, N / tau);
}

double ess(const ScalarTrace& trace) { return ess(std::span<const double>(trace.values)); }

double averaged_ess(const DrawStore& draws) {
    if (draws.size() < 2) throw DomainError("averaged_ess: need at least 2 draws");
    const std::size_t entries = upper_size(draws.p);
    const std::size_t t = draws.size();
    std::vector<double> trace(t);
    double acc = 0.0;
    for (std::size_t e = 0; e < entries; ++e) {
        for (std::size_t d = 0; d < t; ++d) trace[d] = draws.omega_upper[d][e];
        acc += ess(trace);
    }
    return acc / static_cast<double>(entries);
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile: empty input");
    if (!(q >= 0.0) || !(q <= 1.0)) throw DomainError("quantile: q must lie in [0,1]");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::pair<double, double> credible_interval(std::span<const double> trace, double level) {
    if (trace.empty()) throw DomainError("credible_interval: empty trace");
    if (!(level > 0.0) || !(level < 1.0))
        throw DomainError("credible_interval: level must lie in (0,1)");
    std::vector<double> sorted(trace.begin(), trace.end());
    std::sort(sorted.begin(), sorted.end());
    const double tail = 0.5 * (1.0 - level);
    return {quantile_sorted(sorted, tail), quantile_sorted(sorted, 1.0 - tail)};
}

Matrix correlation_transform(const Matrix& omega) {
    if (omega.rows() != omega.cols())
        throw ShapeError("correlation_transform: matrix must be square");
    const std::size_t p = omega.rows();
    std::vector<double> inv_sd(p);
    for (std::size_t j = 0; j < p; ++j) {
        if (!(omega(j, j) > 0.0))
            throw DomainError("correlation_transform: diagonal must be positive");
        inv_sd[j] = 1.0 / std::sqrt(omega(j, j));
    }
    Matrix corr(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        corr(j, j) = 1.0;  // exactly, by definition
        for (std::size_t q = j + 1; q < p; ++q) {
            const double r = omega(j, q) * inv_sd[j] * inv_sd[q];
            corr(j, q) = r;
            corr(q, j) = r;
        }
    }
    return corr;
}

double mean_sq_dev_from_sample_corr(const DrawStore& draws, const Matrix& sample_corr) {
    const std::size_t p = draws.p;
    if (sample_corr.rows() != p || sample_corr.cols() != p)
        throw ShapeError("mean_sq_dev: sample correlation dimension mismatch");
    if (draws.size() == 0) throw DomainError("mean_sq_dev: empty draw store");

    const std::size_t entries = upper_size(p);
    double acc = 0.0;
    std::vector<double> inv_sd(p);
    for (const auto& draw : draws.omega_upper) {
        for (std::size_t j = 0; j < p; ++j) {
            const double d = draw[upper_index(p, j, j)];
            if (!(d > 0.0))
                throw DomainError("mean_sq_dev: draw with non-positive diagonal");
            inv_sd[j] = 1.0 / std::sqrt(d);
        }
        std::size_t k = 0;
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t q = j; q < p; ++q) {
                const double r = (q == j) ? 1.0 : draw[k] * inv_sd[j] * inv_sd[q];
                ++k;
                const double dev = r - sample_corr(j, q);
                acc += dev * dev;
            }
    }
    return acc / (static_cast<double>(draws.size()) * static_cast<double>(entries));
}

Matrix sample_correlation(const Matrix& y) {
    const std::size_t n = y.rows();
    const std::size_t p = y.cols();
    if (n < 2) throw DomainError("sample_correlation: need at least 2 rows");

    std::vector<double> mean(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = y.row(i);
        for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(n);

    Matrix centered(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) centered(i, j) = y(i, j) - mean[j];

    Matrix cov(p, p);
    kernels::syrk_ata(centered.data(), n, p, cov.data());
    return correlation_transform(cov);
}

Matrix posterior_mean_omega(const DrawStore& draws) {
    if (draws.size() == 0) throw DomainError("posterior_mean_omega: empty draw store");
    const std::size_t p = draws.p;
    std::vector<double> acc(upper_size(p), 0.0);
    for (const auto& draw : draws.omega_upper)
        kernels::axpy(1.0, draw.data(), acc.data(), acc.size());
    const double inv_t = 1.0 / static_cast<double>(draws.size());
    Matrix out(p, p);
    std::size_t k = 0;
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t q = j; q < p; ++q) {
            const double v = acc[k++] * inv_t;
            out(j, q) = v;
            out(q, j) = v;
        }
    return out;
}

Matrix posterior_mean_correlation(const DrawStore& draws) {
    if (draws.size() == 0)
        throw DomainError("posterior_mean_correlation: empty draw store");
    const std::size_t p = draws.p;
    Matrix acc(p, p);
    std::vector<double> inv_sd(p);
    for (const auto& draw : draws.omega_upper) {
        for (std::size_t j = 0; j < p; ++j)
            inv_sd[j] = 1.0 / std::sqrt(draw[upper_index(p, j, j)]);
        std::size_t k = 0;
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t q = j; q < p; ++q) {
                const double r = (q == j) ? 1.0 : draw[k] * inv_sd[j] * inv_sd[q];
                ++k;
                acc(j, q) += r;
            }
    }
    const double inv_t = 1.0 / static_cast<double>(draws.size());
    Matrix out(p, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t q = j; q < p; ++q) {
            const double v = acc(j, q) * inv_t;
            out(j, q) = v;
            out(q, j) = v;
        }
    return out;
}

}  // namespace cusp::diag
