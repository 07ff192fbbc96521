#pragma once

#include <cstddef>
#include <vector>

#include "cusp/rng.hpp"

namespace cusp::prior {

// Hyper-parameters of the cumulative shrinkage process: expected number of
// active terms alpha, inverse-gamma slab InvGa(a_theta, b_theta), spike
// location theta_inf.
struct CuspHyper {
    double alpha = 5.0;
    double a_theta = 2.0;
    double b_theta = 2.0;
    double theta_inf = 0.05;

    // Throws DomainError on alpha/a_theta/b_theta <= 0 or theta_inf < 0.
    void validate() const;
    // Slab mean b/(a-1); requires a_theta > 1.
    double slab_mean() const;
    // False when b_theta/a_theta <= theta_inf, which breaks the cumulative
    // shrinkage ordering for the loadings; callers should warn.
    bool shrinkage_ordering_ok() const { return b_theta / a_theta > theta_inf; }
};

// Stick-breaking state: v in (0,1], omega_l = v_l prod_{m<l}(1-v_m),
// pi_h = sum_{l<=h} omega_l.
struct StickState {
    std::vector<double> v;
    std::vector<double> omega;
    std::vector<double> pi;

    std::size_t size() const { return v.size(); }
    bool operator==(const StickState&) const = default;
};

// Computes omega and pi from stick proportions. Throws DomainError for
// entries outside (0,1].
StickState stick_break(std::vector<double> v);

// Closed-form prior diagnostics; h is a 1-based component index.
double expected_pi(double alpha, unsigned h);
double expected_theta(double alpha, unsigned h, double theta0, double theta_inf);
double tail_prob(double alpha, unsigned h, double p0_outside_mass);
double truncation_bound(double alpha, unsigned trunc, double p0_outside_mass);
double expected_active(double alpha);

// Slab mass outside the epsilon-ball around theta_inf:
// P0{ |X - theta_inf| > eps } for X ~ InvGa(a_theta, b_theta).
double invgamma_outside_mass(const CuspHyper& hyper, double eps);
// Slab mass outside the zero-centred ball: P(X > eps).
double invgamma_mass_above(double a_theta, double b_theta, double eps);

// One draw of the truncated prior: sticks with v_H = 1, indicators z
// (0-based, spike when z[h] <= h), theta values, and the active count
// H* = #{h : z[h] > h}.
struct PriorSequenceDraw {
    StickState sticks;
    std::vector<int> z;
    std::vector<double> theta;
    std::size_t active_count = 0;
};

PriorSequenceDraw sample_prior_sequence(const CuspHyper& hyper, std::size_t trunc,
                                        RngStream& rng);

}  // namespace cusp::prior
