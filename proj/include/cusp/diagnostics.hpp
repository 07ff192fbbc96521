#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cusp/factor_model.hpp"

namespace cusp::diag {

struct ScalarTrace {
    std::vector<double> values;
    std::string label;
};

// Posterior-averaged mean square error against a reference covariance:
// mean over retained draws and upper-triangle entries (diagonal included) of
// (Omega_jq - Omega0_jq)^2.
double posterior_mse(const DrawStore& draws, const Matrix& omega0);

// Effective sample size N / (1 + 2 sum_k rho_k) with the autocorrelation sum
// truncated by the initial monotone positive sequence rule; clipped to (0, N].
// Throws DegenerateDistributionError for a constant trace, DomainError for
// fewer than 10 values.
double ess(std::span<const double> trace);
double ess(const ScalarTrace& trace);

// Mean per-entry ESS over the p(p+1)/2 upper-triangle traces of Omega.
double averaged_ess(const DrawStore& draws);

// Equal-tailed interval from type-7 empirical quantiles.
std::pair<double, double> credible_interval(std::span<const double> trace, double level);

// Type-7 quantile of already sorted values.
double quantile_sorted(std::span<const double> sorted, double q);

// Omega -> correlation matrix (unit diagonal). Throws DomainError on a
// non-positive diagonal entry.
Matrix correlation_transform(const Matrix& omega);

// Mean over draws and upper-triangle entries of (corr(Omega)_jq - S_jq)^2.
double mean_sq_dev_from_sample_corr(const DrawStore& draws, const Matrix& sample_corr);

// Column-standardized sample correlation of an n x p data matrix (n >= 2).
Matrix sample_correlation(const Matrix& y);

// Posterior means over retained draws.
Matrix posterior_mean_omega(const DrawStore& draws);
Matrix posterior_mean_correlation(const DrawStore& draws);

}  // namespace cusp::diag
