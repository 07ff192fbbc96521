#include "cusp/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "cusp/diagnostics.hpp"
#include "cusp/distributions.hpp"
#include "cusp/errors.hpp"
#include "cusp/gibbs_cusp.hpp"
#include "cusp/kernels.hpp"

namespace cusp::sim {

const char* method_name(Method m) { return m == Method::cusp ? "cusp" : "mgp"; }

void ScenarioSpec::validate() const {
    if (p == 0 || n == 0 || replicates == 0)
        throw DomainError("scenario: p, n and replicates must be positive");
    if (h0 == 0 || h0 > p) throw DomainError("scenario: need 1 <= h0 <= p");
    hyper.validate();
    mgp_hyper.validate();
    settings.validate();
}

std::pair<Dataset, Matrix> generate_dataset(std::size_t p, std::size_t h0,
                                            std::size_t n, RngStream& rng) {
    if (h0 == 0 || h0 > p) throw DomainError("generate_dataset: need 1 <= h0 <= p");
    if (n == 0) throw DomainError("generate_dataset: need n >= 1");

    Matrix loadings(p, h0);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t h = 0; h < h0; ++h)
            loadings(j, h) = prob::sample_std_normal(rng);

    Matrix omega0(p, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t q = j; q < p; ++q) {
            double v = kernels::dot(loadings.row(j), loadings.row(q), h0);
            if (q == j) v += 1.0;
            omega0(j, q) = v;
            omega0(q, j) = v;
        }

    Dataset data;
    data.y = Matrix(n, p);
    std::vector<double> scores(h0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t h = 0; h < h0; ++h) scores[h] = prob::sample_std_normal(rng);
        double* row = data.y.row(i);
        for (std::size_t j = 0; j < p; ++j)
            row[j] = kernels::dot(loadings.row(j), scores.data(), h0) +
                     prob::sample_std_normal(rng);
    }
    return {std::move(data), std::move(omega0)};
}

ReplicateResult run_replicate(const ScenarioSpec& spec, std::size_t r) {
    ReplicateResult row;
    row.index = r;
    try {
        const RngStream root(spec.master_seed);
        RngStream data_rng = root.split(3 * r);
        auto [data, omega0] = generate_dataset(spec.p, spec.h0, spec.n, data_rng);

        DrawStore draws;
        const auto start = std::chrono::steady_clock::now();
        if (spec.method == Method::cusp) {
            RngStream chain_rng = root.split(3 * r + 1);
            draws = run_chain(data, spec.hyper, spec.settings, chain_rng);
        } else {
            RngStream chain_rng = root.split(3 * r + 2);
            draws = mgp::run_chain_mgp(data, spec.mgp_hyper, spec.settings, chain_rng);
        }
        const auto stop = std::chrono::steady_clock::now();
        row.seconds = std::chrono::duration<double>(stop - start).count();

        row.mse = diag::posterior_mse(draws, omega0);
        double hs = 0.0;
        for (int v : draws.h_star) hs += v;
        row.mean_h_star = hs / static_cast<double>(draws.size());
        row.averaged_ess = diag::averaged_ess(draws);
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

Aggregate aggregate_values(std::vector<double> values) {
    if (values.empty()) throw EmptyResultError("aggregate: no values");
    std::sort(values.begin(), values.end());
    Aggregate a;
    a.median = diag::quantile_sorted(values, 0.5);
    a.iqr = diag::quantile_sorted(values, 0.75) - diag::quantile_sorted(values, 0.25);
    return a;
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
    spec.validate();
    ScenarioResult result;
    result.spec = spec;
    result.rows.resize(spec.replicates);

    std::size_t workers = spec.workers;
    if (workers == 0) {
        workers = std::thread::hardware_concurrency();
        if (workers == 0) workers = 1;
    }
    workers = std::min(workers, spec.replicates);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= spec.replicates) return;
            result.rows[r] = run_replicate(spec, r);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<double> mse, hs, essv, secs;
    for (const auto& row : result.rows) {
        if (!row.ok) {
            ++result.failures;
            continue;
        }
        mse.push_back(row.mse);
        hs.push_back(row.mean_h_star);
        essv.push_back(row.averaged_ess);
        secs.push_back(row.seconds);
    }
    if (!mse.empty()) {
        result.mse = aggregate_values(mse);
        result.h_star = aggregate_values(hs);
        result.averaged_ess = aggregate_values(essv);
        result.seconds = aggregate_values(secs);
    }
    return result;
}

std::string summarize_replicates(const ScenarioResult& result) {
    if (result.rows.size() == result.failures)
        throw EmptyResultError("summarize_replicates: no successful replicates");
    std::ostringstream out;
    out << "(p,H0)=(" << result.spec.p << "," << result.spec.h0 << ")  method="
        << method_name(result.spec.method) << "  replicates="
        << result.rows.size() - result.failures << "/" << result.rows.size() << "\n";
    out << "metric            median      iqr\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "mse          %11.4f %8.4f\n", result.mse.median,
                  result.mse.iqr);
    out << buf;
    std::snprintf(buf, sizeof(buf), "E(H*|y)      %11.4f %8.4f\n", result.h_star.median,
                  result.h_star.iqr);
    out << buf;
    std::snprintf(buf, sizeof(buf), "averaged ess %11.2f %8.2f\n",
                  result.averaged_ess.median, result.averaged_ess.iqr);
    out << buf;
    std::snprintf(buf, sizeof(buf), "runtime (s)  %11.2f %8.2f\n", result.seconds.median,
                  result.seconds.iqr);
    out << buf;
    return out.str();
}

}  // namespace cusp::sim
