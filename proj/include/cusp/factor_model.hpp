#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cusp/cusp_prior.hpp"
#include "cusp/linalg.hpp"

namespace cusp {

// Preprocessing applied to raw data (column negation happens before centering).
struct Provenance {
    bool centered = false;
    std::vector<std::size_t> negated_columns;  // 1-based column indices

    bool operator==(const Provenance&) const = default;
};

// n x p observation matrix. n >= 1 is enforced at the ingestion points
// (load_csv, generate_dataset); the sampler update steps themselves accept
// n = 0, which runs them as a prior sampler (used by the prior-recovery
// tests).
struct Dataset {
    Matrix y;
    Provenance provenance;

    std::size_t n() const { return y.rows(); }
    std::size_t p() const { return y.cols(); }
};

// Factor-model hyper-parameters: CUSP prior on the loading variances plus the
// InvGa(a_sigma, b_sigma) prior on the idiosyncratic variances.
struct FactorHyper {
    prior::CuspHyper cusp;
    double a_sigma = 1.0;
    double b_sigma = 0.3;

    // Requires theta_inf > 0 (the indicator update evaluates a Gaussian with
    // variance theta_inf). a_theta > 1 — the sufficient condition for a finite
    // covariance prior mean — is enforced at the configuration layer, not
    // here: the conditionals stay proper for any a_theta > 0.
    void validate() const;
};

struct McmcSettings {
    std::size_t n_iterations = 15000;
    std::size_t burn_in = 5000;
    std::size_t thin = 5;
    std::size_t adapt_start = 500;  // no adaptation before this iteration
    double alpha0 = -1.0;           // adaptation probability exp(alpha0 + alpha1*t)
    double alpha1 = -5e-4;
    std::uint64_t seed = 1;

    void validate() const;
    std::size_t retained() const { return (n_iterations - burn_in) / thin; }
};

// Flattened upper-triangle index of (j, q) with j <= q in a p x p matrix.
inline std::size_t upper_index(std::size_t p, std::size_t j, std::size_t q) {
    return j * p - j * (j + 1) / 2 + q;
}
inline std::size_t upper_size(std::size_t p) { return p * (p + 1) / 2; }

// Append-only container of retained posterior draws: the upper triangle of
// Omega = Lambda Lambda^T + Sigma per draw, the active-factor count H*, the
// truncation H, and the iteration index. The manifest carries everything
// needed to re-run the chain bit-identically.
struct DrawStore {
    std::size_t p = 0;
    std::vector<std::vector<double>> omega_upper;
    std::vector<int> h_star;
    std::vector<int> h_trunc;
    std::vector<std::uint64_t> iteration;
    std::map<std::string, std::string> manifest;

    std::size_t size() const { return omega_upper.size(); }
    void append(std::vector<double> omega, int hstar, int h, std::uint64_t iter);
    // Entry (j, q), j <= q, of the stored Omega draw.
    double omega_entry(std::size_t draw, std::size_t j, std::size_t q) const {
        return omega_upper[draw][upper_index(p, j, q)];
    }

    bool operator==(const DrawStore&) const = default;
};

}  // namespace cusp
