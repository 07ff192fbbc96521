#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cusp/factor_model.hpp"
#include "cusp/rng.hpp"

namespace cusp {

// Full Gibbs state of the CUSP factor model. Indicators z are 0-based: column
// h is modelled by the spike exactly when z[h] <= h, so at most H-1 columns
// can be active.
struct ChainState {
    Matrix lambda;               // p x H loadings
    Matrix eta;                  // n x H factor scores
    std::vector<double> sigma2;  // p idiosyncratic variances
    std::vector<double> theta;   // H loading variances
    prior::StickState sticks;    // length H, v[H-1] == 1
    std::vector<int> z;          // length H

    std::size_t truncation() const { return theta.size(); }
};

// Draws the initial state from the priors. Throws ConfigError when
// h_init > p+1.
ChainState init_chain(const Dataset& data, const FactorHyper& hyper,
                      std::size_t h_init, RngStream& rng);

// One conditional update each; RNG consumption order is fixed (row/column
// index ascending) so runs are reproducible.
void update_loadings(ChainState& state, const Dataset& data, RngStream& rng);
void update_idiosyncratic_variances(ChainState& state, const Dataset& data,
                                    const FactorHyper& hyper, RngStream& rng);
void update_factors(ChainState& state, const Dataset& data, RngStream& rng);
void update_z(ChainState& state, const FactorHyper& hyper, RngStream& rng);
void update_sticks(ChainState& state, const FactorHyper& hyper, RngStream& rng);
void update_thetas(ChainState& state, const FactorHyper& hyper, RngStream& rng);

// One full cycle: loadings, variances, factors, indicators, sticks, thetas.
void gibbs_cycle(ChainState& state, const Dataset& data, const FactorHyper& hyper,
                 RngStream& rng);

// #{h : z[h] > h}.
std::size_t count_active(const std::vector<int>& z);

// Stochastic truncation adaptation at iteration t (1-based). Returns true when
// the state was restructured. Growth is a no-op at h_cap.
bool adapt_truncation(ChainState& state, std::size_t t, const McmcSettings& settings,
                      const FactorHyper& hyper, std::size_t h_cap, RngStream& rng);

struct AdaptationEvent {
    std::size_t t;
    std::size_t new_trunc;
    double expected_pi_at_trunc;  // E(pi_H) under the prior, a saturation diagnostic
};

// Runs the adaptive sampler and records Omega/H*/H every thin-th post-burn-in
// iteration (after the adaptation step of that iteration).
DrawStore run_chain(const Dataset& data, const FactorHyper& hyper,
                    const McmcSettings& settings, RngStream& rng,
                    std::vector<AdaptationEvent>* adapt_log = nullptr);

// Omega = Lambda Lambda^T + diag(sigma2), flattened upper triangle.
std::vector<double> omega_upper_from_state(const ChainState& state);

// Posterior parameters of the individual full conditionals. The update steps
// sample from these; the conjugacy oracle tests compare them against
// independently coded closed forms.
struct MvnPosterior {
    std::vector<double> mean;
    Matrix covariance;
};
MvnPosterior loading_row_posterior(const ChainState& state, const Dataset& data,
                                   std::size_t j);
// (shape, rate) of the InvGa conditional for sigma2[j].
std::pair<double, double> sigma2_posterior(const ChainState& state, const Dataset& data,
                                           const FactorHyper& hyper, std::size_t j);
MvnPosterior factor_posterior(const ChainState& state, const Dataset& data,
                              std::size_t i);
// Unnormalized log weights of pr(z[h] = l | -) for l = 0..H-1.
std::vector<double> z_log_weights(const ChainState& state, const FactorHyper& hyper,
                                  std::size_t h);
// (a, b) of the Beta conditional for stick l < H-1.
std::pair<double, double> stick_posterior(const ChainState& state,
                                          const FactorHyper& hyper, std::size_t l);
// (shape, rate) of the InvGa conditional for theta[h] on the slab branch.
std::pair<double, double> theta_posterior(const ChainState& state,
                                          const FactorHyper& hyper, std::size_t h);

}  // namespace cusp
