#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cusp/linalg.hpp"
#include "cusp/rng.hpp"

namespace cusp::prob {

// N_p(0, theta * I_p): isotropic Gaussian with common variance theta.
struct IsoGaussianSpec {
    std::size_t dim;
    double theta;
};

// p-variate Student kernel obtained by mixing N_p(0, theta I) over
// theta ~ InvGa(shape, rate); equals t_{2*shape}(0, (rate/shape) I).
struct IsoStudentSpec {
    std::size_t dim;
    double shape;
    double rate;
};

double sample_std_normal(RngStream& rng);
double sample_normal(RngStream& rng, double mean, double sd);
// Density ~ x^(shape-1) exp(-rate x).
double sample_gamma(RngStream& rng, double shape, double rate);
// Density ~ x^(-shape-1) exp(-rate/x).
double sample_inv_gamma(RngStream& rng, double shape, double rate);
double sample_beta(RngStream& rng, double a, double b);

double log_density_iso_gaussian(std::span<const double> x, const IsoGaussianSpec& spec);
double log_density_iso_student(std::span<const double> x, const IsoStudentSpec& spec);

double log_sum_exp(std::span<const double> x);
// Draws a 0-based index with probability exp(logw[l] - logsumexp(logw)).
std::size_t sample_categorical_log(std::span<const double> logw, RngStream& rng);

// Draw from N(mean, cov). Jitter is added to the diagonal only if the
// factorization fails (see Cholesky).
std::vector<double> sample_mvn(std::span<const double> mean, const Matrix& cov,
                               RngStream& rng);
// Draw from N(mean, A^-1) given the Cholesky factor of the precision A.
std::vector<double> sample_mvn_from_precision_chol(std::span<const double> mean,
                                                   const Cholesky& prec_chol,
                                                   RngStream& rng);

// Regularized incomplete gamma functions, P(a,x) + Q(a,x) = 1.
double reg_gamma_lower(double a, double x);
double reg_gamma_upper(double a, double x);
// CDF of InvGa(shape, rate) at x.
double inv_gamma_cdf(double shape, double rate, double x);

}  // namespace cusp::prob
