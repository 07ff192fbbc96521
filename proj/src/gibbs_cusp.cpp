#include "cusp/gibbs_cusp.hpp"

#include <algorithm>
#include <cmath>

#include "cusp/distributions.hpp"
#include "cusp/errors.hpp"
#include "cusp/io_format.hpp"
#include "cusp/kernels.hpp"

namespace cusp {

namespace {

// Precision matrix D^-1 + g * G where D = diag(d) and G is symmetric.
Matrix precision_from_gram(const Matrix& gram, const std::vector<double>& d, double g) {
    const std::size_t h = d.size();
    Matrix a(h, h);
    for (std::size_t r = 0; r < h; ++r) {
        const double* grow = gram.row(r);
        double* arow = a.row(r);
        for (std::size_t q = 0; q < h; ++q) arow[q] = g * grow[q];
        arow[r] += 1.0 / d[r];
    }
    return a;
}

Matrix covariance_from_precision(const Cholesky& chol) {
    const std::size_t h = chol.dim();
    Matrix cov(h, h);
    std::vector<double> e(h);
    for (std::size_t k = 0; k < h; ++k) {
        std::fill(e.begin(), e.end(), 0.0);
        e[k] = 1.0;
        chol.solve_in_place(e);
        for (std::size_t r = 0; r < h; ++r) cov(r, k) = e[r];
    }
    return cov;
}

}  // namespace

ChainState init_chain(const Dataset& data, const FactorHyper& hyper, std::size_t h_init,
                      RngStream& rng) {
    hyper.validate();
    const std::size_t p = data.p();
    const std::size_t n = data.n();
    if (h_init < 1 || h_init > p + 1)
        throw ConfigError("init_chain: h_init must lie in [1, p+1]");

    ChainState state;
    prior::PriorSequenceDraw draw = prior::sample_prior_sequence(hyper.cusp, h_init, rng);
    state.sticks = std::move(draw.sticks);
    state.z = std::move(draw.z);
    state.theta = std::move(draw.theta);

    state.lambda = Matrix(p, h_init);
    for (std::size_t h = 0; h < h_init; ++h) {
        const double sd = std::sqrt(state.theta[h]);
        for (std::size_t j = 0; j < p; ++j)
            state.lambda(j, h) = sd * prob::sample_std_normal(rng);
    }
    state.sigma2.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        state.sigma2[j] = prob::sample_inv_gamma(rng, hyper.a_sigma, hyper.b_sigma);
    state.eta = Matrix(n, h_init);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t h = 0; h < h_init; ++h)
            state.eta(i, h) = prob::sample_std_normal(rng);
    return state;
}

void update_loadings(ChainState& state, const Dataset& data, RngStream& rng) {
    const std::size_t p = data.p();
    const std::size_t n = data.n();
    const std::size_t h = state.truncation();

    Matrix gram(h, h);
    kernels::syrk_ata(state.eta.data(), n, h, gram.data());

    std::vector<double> ycol, b(h);
    for (std::size_t j = 0; j < p; ++j) {
        const double inv_s2 = 1.0 / state.sigma2[j];
        Matrix prec = precision_from_gram(gram, state.theta, inv_s2);
        const Cholesky chol = Cholesky::factor(prec);
        data.y.col_copy(j, ycol);
        kernels::gemv_t(state.eta.data(), n, h, ycol.data(), b.data());
        for (double& v : b) v *= inv_s2;
        chol.solve_in_place(b);  // b now holds the conditional mean
        std::vector<double> row = prob::sample_mvn_from_precision_chol(b, chol, rng);
        std::copy(row.begin(), row.end(), state.lambda.row(j));
    }
}

void update_idiosyncratic_variances(ChainState& state, const Dataset& data,
                                    const FactorHyper& hyper, RngStream& rng) {
    const std::size_t p = data.p();
    const std::size_t n = data.n();
    const std::size_t h = state.truncation();

    std::vector<double> fitted(n), ycol;
    std::vector<double> lrow(h);
    for (std::size_t j = 0; j < p; ++j) {
        std::copy(state.lambda.row(j), state.lambda.row(j) + h, lrow.begin());
        kernels::gemv_n(state.eta.data(), n, h, lrow.data(), fitted.data());
        data.y.col_copy(j, ycol);
        const double rss = kernels::sq_diff_sum(ycol.data(), fitted.data(), n);
        state.sigma2[j] = prob::sample_inv_gamma(rng, hyper.a_sigma + 0.5 * n,
                                                 hyper.b_sigma + 0.5 * rss);
    }
}

void update_factors(ChainState& state, const Dataset& data, RngStream& rng) {
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

std::vector<double> z_log_weights(const ChainState& state, const FactorHyper& hyper,
                                  std::size_t h) {
    const std::size_t trunc = state.truncation();
    const std::size_t p = state.lambda.rows();
    std::vector<double> lcol;
    state.lambda.col_copy(h, lcol);

    const double spike = prob::log_density_iso_gaussian(
        lcol, prob::IsoGaussianSpec{p, hyper.cusp.theta_inf});
    const double slab = prob::log_density_iso_student(
        lcol, prob::IsoStudentSpec{p, hyper.cusp.a_theta, hyper.cusp.b_theta});

    std::vector<double> logw(trunc);
    for (std::size_t l = 0; l < trunc; ++l) {
        const double w = state.sticks.omega[l];
        const double lw = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
        logw[l] = lw + (l <= h ? spike : slab);
    }
    return logw;
}

void update_z(ChainState& state, const FactorHyper& hyper, RngStream& rng) {
    const std::size_t trunc = state.truncation();
    for (std::size_t h = 0; h < trunc; ++h) {
        const std::vector<double> logw = z_log_weights(state, hyper, h);
        state.z[h] = static_cast<int>(prob::sample_categorical_log(logw, rng));
    }
}

std::pair<double, double> stick_posterior(const ChainState& state,
                                          const FactorHyper& hyper, std::size_t l) {
    double n_eq = 0.0, n_gt = 0.0;
    for (int zh : state.z) {
        if (zh == static_cast<int>(l)) n_eq += 1.0;
        if (zh > static_cast<int>(l)) n_gt += 1.0;
    }
    return {1.0 + n_eq, hyper.cusp.alpha + n_gt};
}

void update_sticks(ChainState& state, const FactorHyper& hyper, RngStream& rng) {
    const std::size_t trunc = state.truncation();
    std::vector<double> v(trunc);
    for (std::size_t l = 0; l + 1 < trunc; ++l) {
        const auto [a, b] = stick_posterior(state, hyper, l);
        v[l] = prob::sample_beta(rng, a, b);
    }
    v[trunc - 1] = 1.0;
    state.sticks = prior::stick_break(std::move(v));
}

std::pair<double, double> theta_posterior(const ChainState& state,
                                          const FactorHyper& hyper, std::size_t h) {
    const std::size_t p = state.lambda.rows();
    std::vector<double> lcol;
    state.lambda.col_copy(h, lcol);
    return {hyper.cusp.a_theta + 0.5 * static_cast<double>(p),
            hyper.cusp.b_theta + 0.5 * kernels::sumsq(lcol.data(), lcol.size())};
}

void update_thetas(ChainState& state, const FactorHyper& hyper, RngStream& rng) {
    const std::size_t trunc = state.truncation();
    for (std::size_t h = 0; h < trunc; ++h) {
        if (state.z[h] <= static_cast<int>(h)) {
            state.theta[h] = hyper.cusp.theta_inf;
        } else {
            const auto [shape, rate] = theta_posterior(state, hyper, h);
            state.theta[h] = prob::sample_inv_gamma(rng, shape, rate);
        }
    }
}

void gibbs_cycle(ChainState& state, const Dataset& data, const FactorHyper& hyper,
                 RngStream& rng) {
    update_loadings(state, data, rng);
    update_idiosyncratic_variances(state, data, hyper, rng);
    update_factors(state, data, rng);
    update_z(state, hyper, rng);
    update_sticks(state, hyper, rng);
    update_thetas(state, hyper, rng);
}

std::size_t count_active(const std::vector<int>& z) {
    std::size_t count = 0;
    for (std::size_t h = 0; h < z.size(); ++h)
        if (z[h] > static_cast<int>(h)) ++count;
    return count;
}

namespace {

// Draw an indicator from the current cumulative stick weights.
int draw_z_from_sticks(const prior::StickState& sticks, RngStream& rng) {
    const double u = rng.next_double();
    const auto it = std::upper_bound(sticks.pi.begin(), sticks.pi.end(), u);
    const std::size_t idx = static_cast<std::size_t>(it - sticks.pi.begin());
    return static_cast<int>(std::min(idx, sticks.pi.size() - 1));
}

// Appended slot shared by both adaptation branches: indicator from the new
// sticks (necessarily spike, since z <= H always holds for the last slot),
// spike-scale loading column, standard-normal factor column.
void append_spike_component(ChainState& state, const FactorHyper& hyper,
                            RngStream& rng) {
    const std::size_t p = state.lambda.rows();
    const std::size_t n = state.eta.rows();
    const std::size_t last = state.truncation() - 1;
    state.z[last] = draw_z_from_sticks(state.sticks, rng);
    state.theta[last] = hyper.cusp.theta_inf;
    const double sd = std::sqrt(hyper.cusp.theta_inf);
    for (std::size_t j = 0; j < p; ++j)
        state.lambda(j, last) = sd * prob::sample_std_normal(rng);
    for (std::size_t i = 0; i < n; ++i)
        state.eta(i, last) = prob::sample_std_normal(rng);
}

}  // namespace

bool adapt_truncation(ChainState& state, std::size_t t, const McmcSettings& settings,
                      const FactorHyper& hyper, std::size_t h_cap, RngStream& rng) {
    if (t < settings.adapt_start) return false;
    const double u = rng.next_double();
    if (u >= std::exp(settings.alpha0 + settings.alpha1 * static_cast<double>(t)))
        return false;

    const std::size_t trunc = state.truncation();
    const std::size_t active = count_active(state.z);
    const std::size_t p = state.lambda.rows();
    const std::size_t n = state.eta.rows();

    if (active < trunc - 1) {
        // Shrink: keep the active columns in order, re-impose v_H = 1, append
        // one spike-born component.
        const std::size_t new_trunc = active + 1;
        std::vector<std::size_t> keep;
        keep.reserve(active);
        for (std::size_t h = 0; h < trunc; ++h)
            if (state.z[h] > static_cast<int>(h)) keep.push_back(h);

        Matrix lambda(p, new_trunc), eta(n, new_trunc);
        std::vector<double> theta(new_trunc), v(new_trunc);
        std::vector<int> z(new_trunc);
        for (std::size_t k = 0; k < keep.size(); ++k) {
            const std::size_t h = keep[k];
            for (std::size_t j = 0; j < p; ++j) lambda(j, k) = state.lambda(j, h);
            for (std::size_t i = 0; i < n; ++i) eta(i, k) = state.eta(i, h);
            theta[k] = state.theta[h];
            v[k] = state.sticks.v[h];
            // Kept columns stay active; pointing their indicator at the last
            // slot preserves z[k] > k and the recorded H*.
            z[k] = static_cast<int>(new_trunc - 1);
        }
        v[new_trunc - 1] = 1.0;
        state.lambda = std::move(lambda);
        state.eta = std::move(eta);
        state.theta = std::move(theta);
        state.z = std::move(z);
        state.sticks = prior::stick_break(std::move(v));
        append_spike_component(state, hyper, rng);
        return true;
    }

    if (trunc >= h_cap) return false;  // growth request at the cap is a no-op

    // Grow: fresh stick at the old tail position, v_H = 1 re-imposed, one
    // spike column appended.
    const std::size_t new_trunc = trunc + 1;
    Matrix lambda(p, new_trunc), eta(n, new_trunc);
    std::vector<double> theta(new_trunc), v(new_trunc);
    std::vector<int> z(new_trunc);
    for (std::size_t h = 0; h < trunc; ++h) {
        for (std::size_t j = 0; j < p; ++j) lambda(j, h) = state.lambda(j, h);
        for (std::size_t i = 0; i < n; ++i) eta(i, h) = state.eta(i, h);
        theta[h] = state.theta[h];
        z[h] = state.z[h];
        v[h] = state.sticks.v[h];
    }
    v[new_trunc - 2] = prob::sample_beta(rng, 1.0, hyper.cusp.alpha);
    v[new_trunc - 1] = 1.0;
    state.lambda = std::move(lambda);
    state.eta = std::move(eta);
    state.theta = std::move(theta);
    state.z = std::move(z);
    state.sticks = prior::stick_break(std::move(v));
    append_spike_component(state, hyper, rng);
    return true;
}

std::vector<double> omega_upper_from_state(const ChainState& state) {
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

DrawStore run_chain(const Dataset& data, const FactorHyper& hyper,
                    const McmcSettings& settings, RngStream& rng,
                    std::vector<AdaptationEvent>* adapt_log) {
    hyper.validate();
    settings.validate();
    const std::size_t p = data.p();

    ChainState state = init_chain(data, hyper, p + 1, rng);

    DrawStore store;
    store.p = p;
    for (std::size_t t = 1; t <= settings.n_iterations; ++t) {
        gibbs_cycle(state, data, hyper, rng);
        if (adapt_truncation(state, t, settings, hyper, p + 1, rng) && adapt_log) {
            adapt_log->push_back(
                {t, state.truncation(),
                 prior::expected_pi(hyper.cusp.alpha,
                                    static_cast<unsigned>(state.truncation()))});
        }
        if (t > settings.burn_in && (t - settings.burn_in) % settings.thin == 0) {
            store.append(omega_upper_from_state(state),
                         static_cast<int>(count_active(state.z)),
                         static_cast<int>(state.truncation()), t);
        }
    }

    store.manifest["method"] = "cusp";
    store.manifest["p"] = std::to_string(p);
    store.manifest["n"] = std::to_string(data.n());
    store.manifest["seed"] = std::to_string(settings.seed);
    store.manifest["n_iterations"] = std::to_string(settings.n_iterations);
    store.manifest["burn_in"] = std::to_string(settings.burn_in);
    store.manifest["thin"] = std::to_string(settings.thin);
    store.manifest["adapt_start"] = std::to_string(settings.adapt_start);
    store.manifest["alpha0"] = io::format_double(settings.alpha0);
    store.manifest["alpha1"] = io::format_double(settings.alpha1);
    store.manifest["alpha"] = io::format_double(hyper.cusp.alpha);
    store.manifest["a_theta"] = io::format_double(hyper.cusp.a_theta);
    store.manifest["b_theta"] = io::format_double(hyper.cusp.b_theta);
    store.manifest["theta_inf"] = io::format_double(hyper.cusp.theta_inf);
    store.manifest["a_sigma"] = io::format_double(hyper.a_sigma);
    store.manifest["b_sigma"] = io::format_double(hyper.b_sigma);
    store.manifest["draw_count"] = std::to_string(store.size());
    return store;
}

MvnPosterior loading_row_posterior(const ChainState& state, const Dataset& data,
                                   std::size_t j) {
    const std::size_t n = data.n();
    const std::size_t h = state.truncation();

    Matrix gram(h, h);
    kernels::syrk_ata(state.eta.data(), n, h, gram.data());
    const double inv_s2 = 1.0 / state.sigma2[j];
    Matrix prec = precision_from_gram(gram, state.theta, inv_s2);
    const Cholesky chol = Cholesky::factor(prec);

    std::vector<double> ycol, b(h);
    data.y.col_copy(j, ycol);
    kernels::gemv_t(state.eta.data(), n, h, ycol.data(), b.data());
    for (double& v : b) v *= inv_s2;
    chol.solve_in_place(b);
    return {std::move(b), covariance_from_precision(chol)};
}

std::pair<double, double> sigma2_posterior(const ChainState& state, const Dataset& data,
                                           const FactorHyper& hyper, std::size_t j) {
    const std::size_t n = data.n();
    const std::size_t h = state.truncation();
    std::vector<double> fitted(n), ycol, lrow(h);
    std::copy(state.lambda.row(j), state.lambda.row(j) + h, lrow.begin());
    kernels::gemv_n(state.eta.data(), n, h, lrow.data(), fitted.data());
    data.y.col_copy(j, ycol);
    const double rss = kernels::sq_diff_sum(ycol.data(), fitted.data(), n);
    return {hyper.a_sigma + 0.5 * n, hyper.b_sigma + 0.5 * rss};
}

MvnPosterior factor_posterior(const ChainState& state, const Dataset& data,
                              std::size_t i) {
    const std::size_t p = data.p();
    const std::size_t h = state.truncation();
    std::vector<double> w(p);
    for (std::size_t j = 0; j < p; ++j) w[j] = 1.0 / state.sigma2[j];
    Matrix prec(h, h);
    kernels::syrk_ata_weighted(state.lambda.data(), w.data(), p, h, prec.data());
    for (std::size_t r = 0; r < h; ++r) prec(r, r) += 1.0;
    const Cholesky chol = Cholesky::factor(prec);

    std::vector<double> wy(p), b(h);
    const double* yrow = data.y.row(i);
    for (std::size_t j = 0; j < p; ++j) wy[j] = w[j] * yrow[j];
    kernels::gemv_t(state.lambda.data(), p, h, wy.data(), b.data());
    chol.solve_in_place(b);
    return {std::move(b), covariance_from_precision(chol)};
}

}  // namespace cusp
