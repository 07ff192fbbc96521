#include "cusp/cusp_prior.hpp"

#include <algorithm>
#include <cmath>

#include "cusp/distributions.hpp"
#include "cusp/errors.hpp"

namespace cusp::prior {

void CuspHyper::validate() const {
    if (!(alpha > 0.0)) throw DomainError("cusp hyper: alpha must be positive");
    if (!(a_theta > 0.0)) throw DomainError("cusp hyper: a_theta must be positive");
    if (!(b_theta > 0.0)) throw DomainError("cusp hyper: b_theta must be positive");
    if (!(theta_inf >= 0.0) || !std::isfinite(theta_inf))
        throw DomainError("cusp hyper: theta_inf must be finite and non-negative");
}

double CuspHyper::slab_mean() const {
    if (!(a_theta > 1.0))
        throw DomainError("cusp hyper: slab mean requires a_theta > 1");
    return b_theta / (a_theta - 1.0);
}

StickState stick_break(std::vector<double> v) {
    StickState s;
    s.omega.resize(v.size());
    s.pi.resize(v.size());
    double remaining = 1.0;  // prod_{m<l} (1 - v_m)
    double cum = 0.0;
    for (std::size_t l = 0; l < v.size(); ++l) {
        if (!(v[l] > 0.0) || !(v[l] <= 1.0))
            throw DomainError("stick_break: entries must lie in (0,1]");
        s.omega[l] = v[l] * remaining;
        cum += s.omega[l];
        s.pi[l] = cum;
        remaining *= 1.0 - v[l];
    }
    s.v = std::move(v);
    return s;
}

double expected_pi(double alpha, unsigned h) {
    if (!(alpha > 0.0)) throw DomainError("expected_pi: alpha must be positive");
    if (h < 1) throw DomainError("expected_pi: h must be >= 1");
    return 1.0 - std::pow(alpha / (1.0 + alpha), static_cast<double>(h));
}

double expected_theta(double alpha, unsigned h, double theta0, double theta_inf) {
    if (!(alpha > 0.0)) throw DomainError("expected_theta: alpha must be positive");
    if (h < 1) throw DomainError("expected_theta: h must be >= 1");
    return theta_inf +
           std::pow(alpha / (1.0 + alpha), static_cast<double>(h)) * (theta0 - theta_inf);
}

double tail_prob(double alpha, unsigned h, double p0_outside_mass) {
    if (!(alpha > 0.0)) throw DomainError("tail_prob: alpha must be positive");
    if (h < 1) throw DomainError("tail_prob: h must be >= 1");
    if (!(p0_outside_mass >= 0.0) || !(p0_outside_mass <= 1.0))
        throw DomainError("tail_prob: mass must lie in [0,1]");
    return p0_outside_mass * std::pow(alpha / (1.0 + alpha), static_cast<double>(h));
}

double truncation_bound(double alpha, unsigned trunc, double p0_outside_mass) {
    if (!(alpha > 0.0)) throw DomainError("truncation_bound: alpha must be positive");
    if (!(p0_outside_mass >= 0.0) || !(p0_outside_mass <= 1.0))
        throw DomainError("truncation_bound: mass must lie in [0,1]");
    return p0_outside_mass * alpha *
           std::pow(alpha / (1.0 + alpha), static_cast<double>(trunc));
}

double expected_active(double alpha) {
    if (!(alpha > 0.0)) throw DomainError("expected_active: alpha must be positive");
    return alpha;
}

double invgamma_outside_mass(const CuspHyper& hyper, double eps) {
    hyper.validate();
    if (!(eps > 0.0)) throw DomainError("invgamma_outside_mass: eps must be positive");
    const double hi = hyper.theta_inf + eps;
    const double lo = hyper.theta_inf - eps;
    const double cdf_hi = prob::inv_gamma_cdf(hyper.a_theta, hyper.b_theta, hi);
    const double cdf_lo =
        lo > 0.0 ? prob::inv_gamma_cdf(hyper.a_theta, hyper.b_theta, lo) : 0.0;
    return 1.0 - (cdf_hi - cdf_lo);
}

double invgamma_mass_above(double a_theta, double b_theta, double eps) {
    if (!(eps > 0.0)) throw DomainError("invgamma_mass_above: eps must be positive");
    return 1.0 - prob::inv_gamma_cdf(a_theta, b_theta, eps);
}

PriorSequenceDraw sample_prior_sequence(const CuspHyper& hyper, std::size_t trunc,
                                        RngStream& rng) {
    hyper.validate();
    if (trunc < 1) throw DomainError("sample_prior_sequence: truncation must be >= 1");

    std::vector<double> v(trunc);
    for (std::size_t l = 0; l + 1 < trunc; ++l)
        v[l] = prob::sample_beta(rng, 1.0, hyper.alpha);
    v[trunc - 1] = 1.0;

    PriorSequenceDraw draw;
    draw.sticks = stick_break(std::move(v));
    draw.z.resize(trunc);
    draw.theta.resize(trunc);
    draw.active_count = 0;

    const std::vector<double>& pi = draw.sticks.pi;
    for (std::size_t h = 0; h < trunc; ++h) {
        // Inverse-CDF draw over the cumulative stick weights.
        const double u = rng.next_double();
        const auto it = std::upper_bound(pi.begin(), pi.end(), u);
        const std::size_t zh =
            std::min(static_cast<std::size_t>(it - pi.begin()), trunc - 1);
        draw.z[h] = static_cast<int>(zh);
        if (zh <= h) {
            draw.theta[h] = hyper.theta_inf;
        } else {
            draw.theta[h] = prob::sample_inv_gamma(rng, hyper.a_theta, hyper.b_theta);
            ++draw.active_count;
        }
    }
    return draw;
}

}  // namespace cusp::prior
