#pragma once

#include <utility>
#include <vector>

#include "cusp/factor_model.hpp"
#include "cusp/rng.hpp"

namespace cusp::mgp {

// Multiplicative gamma process hyper-parameters: gamma shapes (a1, a2) on the
// precision increments, local-scale degrees of freedom nu, idiosyncratic
// variance prior, and the column-inactivity threshold used by the adaptation
// rule and the H* count.
struct MgpHyper {
    double a1 = 1.0;
    double a2 = 2.0;
    double nu = 3.0;
    double a_sigma = 1.0;
    double b_sigma = 0.3;
    double eps_threshold = 1e-4;

    void validate() const;
};

// lambda_jh | phi_jh, theta_h ~ N(0, phi_jh * theta_h), phi ~ InvGa(nu/2, nu/2),
// 1/theta_h = prod_{l<=h} increments[l].
struct MgpChainState {
    Matrix lambda;                   // p x H
    Matrix eta;                      // n x H
    std::vector<double> sigma2;      // p
    Matrix phi;                      // p x H local variance scales
    std::vector<double> increments;  // H gamma increments
    std::vector<double> theta;       // H derived column variances

    std::size_t truncation() const { return increments.size(); }
    // Recompute theta from the increments.
    void refresh_theta();
};

MgpChainState init_chain_mgp(const Dataset& data, const MgpHyper& hyper,
                             std::size_t h_init, RngStream& rng);

// One full cycle: loadings, idiosyncratic variances, factors, local scales,
// increments. The conditionals follow by conjugacy from the prior; they are
// gated by the joint-distribution test in the test suite.
void mgp_gibbs_cycle(MgpChainState& state, const Dataset& data, const MgpHyper& hyper,
                     RngStream& rng);

// Columns whose entries all lie within eps of zero count as inactive.
std::size_t count_active_mgp(const MgpChainState& state, double eps);

// Drop inactive columns (always keeping at least one) or append a fresh one
// when every column is active; growth is a no-op at h_cap.
bool mgp_adapt(MgpChainState& state, std::size_t t, const McmcSettings& settings,
               const MgpHyper& hyper, std::size_t h_cap, RngStream& rng);

DrawStore run_chain_mgp(const Dataset& data, const MgpHyper& hyper,
                        const McmcSettings& settings, RngStream& rng);

std::vector<double> omega_upper_from_state(const MgpChainState& state);

// Conditional parameters, exposed for the conjugacy and joint-distribution
// oracles.
std::pair<double, double> phi_posterior(const MgpChainState& state,
                                        const MgpHyper& hyper, std::size_t j,
                                        std::size_t h);  // InvGa(shape, rate)
std::pair<double, double> increment_posterior(const MgpChainState& state,
                                              const MgpHyper& hyper,
                                              std::size_t l);  // Gamma(shape, rate)

}  // namespace cusp::mgp
