#include "cusp/gibbs_mgp.hpp"

#include <algorithm>
#include <cmath>

#include "cusp/distributions.hpp"
#include "cusp/errors.hpp"
#include "cusp/io_format.hpp"
#include "cusp/kernels.hpp"

namespace cusp::mgp {

void MgpHyper::validate() const {
    if (!(a1 > 0.0) || !(a2 > 0.0)) throw DomainError("mgp hyper: a1, a2 must be positive");
    if (!(nu > 0.0)) throw DomainError("mgp hyper: nu must be positive");
    if (!(a_sigma > 0.0) || !(b_sigma > 0.0))
        throw DomainError("mgp hyper: a_sigma and b_sigma must be positive");
    if (!(eps_threshold > 0.0))
        throw DomainError("mgp hyper: eps_threshold must be positive");
}

void MgpChainState::refresh_theta() {
    theta.resize(increments.size());
    double precision = 1.0;
    for (std::size_t h = 0; h < increments.size(); ++h) {
        precision *= increments[h];
        theta[h] = 1.0 / precision;
    }
}

MgpChainState init_chain_mgp(const Dataset& data, const MgpHyper& hyper,
                             std::size_t h_init, RngStream& rng) {
    hyper.validate();
    const std::size_t p = data.p();
    const std::size_t n = data.n();
    if (h_init < 1 || h_init > p + 1)
        throw ConfigError("init_chain_mgp: h_init must lie in [1, p+1]");

    MgpChainState state;
    state.increments.resize(h_init);
    for (std::size_t l = 0; l < h_init; ++l)
        state.increments[l] = prob::sample_gamma(rng, l == 0 ? hyper.a1 : hyper.a2, 1.0);
    state.refresh_theta();

    state.phi = Matrix(p, h_init);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t h = 0; h < h_init; ++h)
            state.phi(j, h) = prob::sample_inv_gamma(rng, 0.5 * hyper.nu, 0.5 * hyper.nu);

    state.lambda = Matrix(p, h_init);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t h = 0; h < h_init; ++h)
            state.lambda(j, h) = std::sqrt(state.phi(j, h) * state.theta[h]) *
                                 prob::sample_std_normal(rng);

    state.sigma2.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        state.sigma2[j] = prob::sample_inv_gamma(rng, hyper.a_sigma, hyper.b_sigma);

    state.eta = Matrix(n, h_init);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t h = 0; h < h_init; ++h)
            state.eta(i, h) = prob::sample_std_normal(rng);
    return state;
}

namespace {

void update_loadings_mgp(MgpChainState& state, const Dataset& data, RngStream& rng) {
    const std::size_t p = data.p();
    const std::size_t n = data.n();
    const std::size_t h = state.truncation();

    Matrix gram(h, h);
    kernels::syrk_ata(state.eta.data(), n, h, gram.data());

    std::vector<double> ycol, b(h);
    Matrix prec(h, h);
    for (std::size_t j = 0; j < p; ++j) {
        const double inv_s2 = 1.0 / state.sigma2[j];
        for (std::size_t r = 0; r < h; ++r) {
            const double* grow = gram.row(r);
            double* arow = prec.row(r);
            for (std::size_t q = 0; q < h; ++q) arow[q] = inv_s2 * grow[q];
            arow[r] += 1.0 / (state.phi(j, r) * state.theta[r]);
        }
        const Cholesky chol = Cholesky::factor(prec);
        data.y.col_copy(j, ycol);
        kernels::gemv_t(state.eta.data(), n, h, ycol.data(), b.data());
        for (double& v : b) v *= inv_s2;
        chol.solve_in_place(b);
        std::vector<double> row = prob::sample_mvn_from_precision_chol(b, chol, rng);
        std::copy(row.begin(), row.end(), state.lambda.row(j));
    }
}

void update_sigma2_mgp(MgpChainState& state, const Dataset& data, const MgpHyper& hyper,
                       RngStream& rng) {
    const std::size_t p = data.p();
    const std::size_t n = data.n();
    const std::size_t h = state.truncation();
    std::vector<double> fitted(n), ycol, lrow(h);
    for (std::size_t j = 0; j < p; ++j) {
        std::copy(state.lambda.row(j), state.lambda.row(j) + h, lrow.begin());
        kernels::gemv_n(state.eta.data(), n, h, lrow.data(), fitted.data());
        data.y.col_copy(j, ycol);
        const double rss = kernels::sq_diff_sum(ycol.data(), fitted.data(), n);
        state.sigma2[j] = prob::sample_inv_gamma(rng, hyper.a_sigma + 0.5 * n,
                                                 hyper.b_sigma + 0.5 * rss);
    }
}

void update_factors_mgp(MgpChainState& state, const Dataset& data, RngStream& rng) {
    const std::size_t p = data.p();
    const std::size_t n = data.n();
    const std::size_t h = state.truncation();

    std::vector<double> w(p);
    for (std::size_t j = 0; j < p; ++j) w[j] = 1.0 / state.sigma2[j];
    Matrix prec(h, h);
    kernels::syrk_ata_weighted(state.lambda.data(), w.data(), p, h, prec.data());
    for (std::size_t r = 0; r < h; ++r) prec(r, r) += 1.0;
    const Cholesky chol = Cholesky::factor(prec);

    std::vector<double> wy(p), b(h);
    for (std::size_t i = 0; i < n; ++i) {
        const double* yrow = data.y.row(i);
        for (std::size_t j = 0; j < p; ++j) wy[j] = w[j] * yrow[j];
        kernels::gemv_t(state.lambda.data(), p, h, wy.data(), b.data());
        chol.solve_in_place(b);
        std::vector<double> row = prob::sample_mvn_from_precision_chol(b, chol, rng);
        std::copy(row.begin(), row.end(), state.eta.row(i));
    }
}

void update_phi_mgp(MgpChainState& state, const MgpHyper& hyper, RngStream& rng) {
    const std::size_t p = state.lambda.rows();
    const std::size_t h = state.truncation();
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t l = 0; l < h; ++l) {
            const auto [shape, rate] = phi_posterior(state, hyper, j, l);
            state.phi(j, l) = prob::sample_inv_gamma(rng, shape, rate);
        }
}

void update_increments_mgp(MgpChainState& state, const MgpHyper& hyper, RngStream& rng) {
    const std::size_t h = state.truncation();
    for (std::size_t l = 0; l < h; ++l) {
        const auto [shape, rate] = increment_posterior(state, hyper, l);
        state.increments[l] = prob::sample_gamma(rng, shape, rate);
    }
    state.refresh_theta();
}

}  // namespace

std::pair<double, double> phi_posterior(const MgpChainState& state, const MgpHyper& hyper,
                                        std::size_t j, std::size_t h) {
    const double lam = state.lambda(j, h);
    return {0.5 * (hyper.nu + 1.0), 0.5 * (hyper.nu + lam * lam / state.theta[h])};
}

std::pair<double, double> increment_posterior(const MgpChainState& state,
                                              const MgpHyper& hyper, std::size_t l) {
    const std::size_t p = state.lambda.rows();
    const std::size_t h = state.truncation();

    // s_q = sum_j lambda_jq^2 / phi_jq; the conditional rate adds the partial
    // precision products with increment l left out.
    double rate = 1.0;
    double partial = 1.0;  // prod_{m<=q, m != l} increments[m]
    for (std::size_t q = 0; q < h; ++q) {
        if (q != l) partial *= state.increments[q];
        if (q < l) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double lam = state.lambda(j, q);
            s += lam * lam / state.phi(j, q);
        }
        rate += 0.5 * partial * s;
    }
    const double shape = (l == 0 ? hyper.a1 : hyper.a2) +
                         0.5 * static_cast<double>(p) * static_cast<double>(h - l);
    return {shape, rate};
}

void mgp_gibbs_cycle(MgpChainState& state, const Dataset& data, const MgpHyper& hyper,
                     RngStream& rng) {
    update_loadings_mgp(state, data, rng);
    update_sigma2_mgp(state, data, hyper, rng);
    update_factors_mgp(state, data, rng);
    update_phi_mgp(state, hyper, rng);
    update_increments_mgp(state, hyper, rng);
}

std::size_t count_active_mgp(const MgpChainState& state, double eps) {
    const std::size_t p = state.lambda.rows();
    const std::size_t h = state.truncation();
    std::size_t active = 0;
    for (std::size_t l = 0; l < h; ++l) {
        double maxabs = 0.0;
        for (std::size_t j = 0; j < p; ++j)
            maxabs = std::max(maxabs, std::fabs(state.lambda(j, l)));
        if (maxabs >= eps) ++active;
    }
    return active;
}

bool mgp_adapt(MgpChainState& state, std::size_t t, const McmcSettings& settings,
               const MgpHyper& hyper, std::size_t h_cap, RngStream& rng) {
    if (t < settings.adapt_start) return false;
    const double u = rng.next_double();
    if (u >= std::exp(settings.alpha0 + settings.alpha1 * static_cast<double>(t)))
        return false;

    const std::size_t p = state.lambda.rows();
    const std::size_t n = state.eta.rows();
    const std::size_t h = state.truncation();

    std::vector<double> maxabs(h, 0.0);
    for (std::size_t l = 0; l < h; ++l)
        for (std::size_t j = 0; j < p; ++j)
            maxabs[l] = std::max(maxabs[l], std::fabs(state.lambda(j, l)));

    std::vector<std::size_t> keep;
    for (std::size_t l = 0; l < h; ++l)
        if (maxabs[l] >= hyper.eps_threshold) keep.push_back(l);

    if (keep.size() == h) {
        // All columns active: append one column with parameters from the prior.
        if (h >= h_cap) return false;
        const std::size_t nh = h + 1;
        Matrix lambda(p, nh), eta(n, nh), phi(p, nh);
        for (std::size_t l = 0; l < h; ++l) {
            for (std::size_t j = 0; j < p; ++j) {
                lambda(j, l) = state.lambda(j, l);
                phi(j, l) = state.phi(j, l);
            }
            for (std::size_t i = 0; i < n; ++i) eta(i, l) = state.eta(i, l);
        }
        state.increments.push_back(prob::sample_gamma(rng, hyper.a2, 1.0));
        state.lambda = std::move(lambda);
        state.eta = std::move(eta);
        state.phi = std::move(phi);
        state.refresh_theta();
        for (std::size_t j = 0; j < p; ++j)
            state.phi(j, h) = prob::sample_inv_gamma(rng, 0.5 * hyper.nu, 0.5 * hyper.nu);
        for (std::size_t j = 0; j < p; ++j)
            state.lambda(j, h) = std::sqrt(state.phi(j, h) * state.theta[h]) *
                                 prob::sample_std_normal(rng);
        for (std::size_t i = 0; i < n; ++i)
            state.eta(i, h) = prob::sample_std_normal(rng);
        return true;
    }

    if (keep.empty()) {
        // Never drop below one column; retain the largest one.
        std::size_t best = 0;
        for (std::size_t l = 1; l < h; ++l)
            if (maxabs[l] > maxabs[best]) best = l;
        keep.push_back(best);
    }

    const std::size_t nh = keep.size();
    Matrix lambda(p, nh), eta(n, nh), phi(p, nh);
    std::vector<double> increments(nh);
    for (std::size_t k = 0; k < nh; ++k) {
        const std::size_t l = keep[k];
        for (std::size_t j = 0; j < p; ++j) {
            lambda(j, k) = state.lambda(j, l);
            phi(j, k) = state.phi(j, l);
        }
        for (std::size_t i = 0; i < n; ++i) eta(i, k) = state.eta(i, l);
        increments[k] = state.increments[l];
    }
    state.lambda = std::move(lambda);
    state.eta = std::move(eta);
    state.phi = std::move(phi);
    state.increments = std::move(increments);
    state.refresh_theta();
    return true;
}

std::vector<double> omega_upper_from_state(const MgpChainState& state) {
    const std::size_t p = state.lambda.rows();
    const std::size_t h = state.truncation();
    std::vector<double> upper(upper_size(p));
    std::size_t k = 0;
    for (std::size_t j = 0; j < p; ++j) {
        const double* rowj = state.lambda.row(j);
        for (std::size_t q = j; q < p; ++q) {
            double v = kernels::dot(rowj, state.lambda.row(q), h);
            if (q == j) v += state.sigma2[j];
            upper[k++] = v;
        }
    }
    return upper;
}

DrawStore run_chain_mgp(const Dataset& data, const MgpHyper& hyper,
                        const McmcSettings& settings, RngStream& rng) {
    hyper.validate();
    settings.validate();
    const std::size_t p = data.p();

    MgpChainState state = init_chain_mgp(data, hyper, p, rng);

    DrawStore store;
    store.p = p;
    // Growth is capped at p: every MGP column can be active, so H = p already
    // saturates the model's rank.
    for (std::size_t t = 1; t <= settings.n_iterations; ++t) {
        mgp_gibbs_cycle(state, data, hyper, rng);
        mgp_adapt(state, t, settings, hyper, p, rng);
        if (t > settings.burn_in && (t - settings.burn_in) % settings.thin == 0) {
            store.append(
                omega_upper_from_state(state),
                static_cast<int>(count_active_mgp(state, hyper.eps_threshold)),
                static_cast<int>(state.truncation()), t);
        }
    }

    store.manifest["method"] = "mgp";
    store.manifest["p"] = std::to_string(p);
    store.manifest["n"] = std::to_string(data.n());
    store.manifest["seed"] = std::to_string(settings.seed);
    store.manifest["n_iterations"] = std::to_string(settings.n_iterations);
    store.manifest["burn_in"] = std::to_string(settings.burn_in);
    store.manifest["thin"] = std::to_string(settings.thin);
    store.manifest["adapt_start"] = std::to_string(settings.adapt_start);
    store.manifest["alpha0"] = io::format_double(settings.alpha0);
    store.manifest["alpha1"] = io::format_double(settings.alpha1);
    store.manifest["a1"] = io::format_double(hyper.a1);
    store.manifest["a2"] = io::format_double(hyper.a2);
    store.manifest["nu"] = io::format_double(hyper.nu);
    store.manifest["eps_threshold"] = io::format_double(hyper.eps_threshold);
    store.manifest["a_sigma"] = io::format_double(hyper.a_sigma);
    store.manifest["b_sigma"] = io::format_double(hyper.b_sigma);
    store.manifest["draw_count"] = std::to_string(store.size());
    return store;
}

}  // namespace cusp::mgp
