#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cusp/factor_model.hpp"
#include "cusp/gibbs_mgp.hpp"
#include "cusp/rng.hpp"

namespace cusp::sim {

enum class Method { cusp, mgp };

const char* method_name(Method m);

// One simulation scenario: data dimensions, replicate count, method, and the
// hyper-parameters/settings to run with.
struct ScenarioSpec {
    std::size_t p = 20;
    std::size_t h0 = 5;
    std::size_t n = 100;
    std::size_t replicates = 5;
    Method method = Method::cusp;
    FactorHyper hyper;
    mgp::MgpHyper mgp_hyper;
    McmcSettings settings;
    std::uint64_t master_seed = 1;
    std::size_t workers = 0;  // 0 = one per hardware thread, capped by replicates

    void validate() const;
};

struct ReplicateResult {
    std::size_t index = 0;
    bool ok = false;
    std::string error;
    double mse = 0.0;
    double mean_h_star = 0.0;
    double averaged_ess = 0.0;
    double seconds = 0.0;  // sampler wall clock only; never persisted
};

struct Aggregate {
    double median = 0.0;
    double iqr = 0.0;
};

struct ScenarioResult {
    ScenarioSpec spec;
    std::vector<ReplicateResult> rows;
    std::size_t failures = 0;
    Aggregate mse, h_star, averaged_ess, seconds;
};

// True covariance Lambda0 Lambda0^T + I with iid standard normal loadings;
// returns the dataset drawn from N_p(0, Omega0) and Omega0 itself.
std::pair<Dataset, Matrix> generate_dataset(std::size_t p, std::size_t h0,
                                            std::size_t n, RngStream& rng);

// Replicate r derives its streams from the master seed: data = split(3r),
// CUSP chain = split(3r+1), MGP chain = split(3r+2). Re-running one replicate
// in isolation reproduces its row bit-identically. Failed replicates are
// recorded, not dropped.
ScenarioResult run_scenario(const ScenarioSpec& spec);

// Runs one replicate synchronously (used by run_scenario's workers and by the
// determinism tests).
ReplicateResult run_replicate(const ScenarioSpec& spec, std::size_t r);

// Median and interquartile range (type-7 quantiles).
Aggregate aggregate_values(std::vector<double> values);

// Medians/IQRs per metric in the column order mse, E(H*|y), averaged ESS,
// runtime. Throws EmptyResultError when no replicate succeeded.
std::string summarize_replicates(const ScenarioResult& result);

}  // namespace cusp::sim
