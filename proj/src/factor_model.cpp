#include "cusp/factor_model.hpp"

#include <cmath>

#include "cusp/errors.hpp"

namespace cusp {

void FactorHyper::validate() const {
    cusp.validate();
    if (!(cusp.theta_inf > 0.0))
        throw DomainError(
            "factor hyper: theta_inf must be strictly positive (the indicator update "
            "evaluates a Gaussian with variance theta_inf)");
    if (!(a_sigma > 0.0) || !(b_sigma > 0.0))
        throw DomainError("factor hyper: a_sigma and b_sigma must be positive");
}

void McmcSettings::validate() const {
    if (n_iterations == 0 || thin == 0)
        throw DomainError("mcmc settings: n_iterations and thin must be positive");
    if (burn_in >= n_iterations)
        throw DomainError("mcmc settings: burn_in must be smaller than n_iterations");
    if (!(alpha0 <= 0.0) || !(alpha1 < 0.0))
        throw DomainError(
            "mcmc settings: need alpha0 <= 0 and alpha1 < 0 (diminishing adaptation)");
}

void DrawStore::append(std::vector<double> omega, int hstar, int h,
                       std::uint64_t iter) {
    omega_upper.push_back(std::move(omega));
    h_star.push_back(hstar);
    h_trunc.push_back(h);
    iteration.push_back(iter);
}

}  // namespace cusp
