#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cusp/errors.hpp"
#include "cusp/linalg.hpp"
#include "cusp/sim_harness.hpp"
#include "support/stats.hpp"

using namespace cusp;
namespace ts = testsupport;

namespace {

McmcSettings quick_settings(std::size_t iters = 300, std::size_t burn = 100) {
    McmcSettings s;
    s.n_iterations = iters;
    s.burn_in = burn;
    s.thin = 5;
    s.adapt_start = 50;
    s.seed = 7;
    return s;
}

}  // namespace

TEST_CASE("generate_dataset: structure of the true covariance") {
    RngStream rng(70);
    auto [data, omega0] = sim::generate_dataset(20, 5, 50, rng);
    CHECK(data.n() == 50);
    CHECK(data.p() == 20);

    for (std::size_t j = 0; j < 20; ++j) {
        CHECK(omega0(j, j) >= 1.0);  // Lambda0 row norm squared plus unit noise
        for (std::size_t q = 0; q < 20; ++q)
            CHECK(omega0(j, q) == omega0(q, j));
    }
    CHECK_NOTHROW(Cholesky::factor(omega0));

    // E(Omega0_jj) = H0 + 1; average the diagonal over 200 seeds.
    std::vector<double> diags;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        RngStream r(1000 + seed);
        auto [d2, o2] = sim::generate_dataset(20, 5, 1, r);
        for (std::size_t j = 0; j < 20; ++j) diags.push_back(o2(j, j));
    }
    const ts::MeanSe ms = ts::mean_se(diags);
    CHECK(std::fabs(ms.mean - 6.0) <= 3.0 * ms.se);

    // Determinism per seed.
    RngStream r1(71), r2(71);
    auto [da, oa] = sim::generate_dataset(6, 2, 10, r1);
    auto [db, ob] = sim::generate_dataset(6, 2, 10, r2);
    CHECK(da.y == db.y);
    CHECK(oa == ob);

    RngStream r3(72);
    CHECK_THROWS_AS(sim::generate_dataset(4, 5, 10, r3), DomainError);
}

TEST_CASE("generate_dataset: sample covariance converges to the truth") {
    RngStream rng(73);
    const std::size_t p = 4, h0 = 2, n = 100000;
    auto [data, omega0] = sim::generate_dataset(p, h0, n, rng);

    // Entrywise: cov estimate within 3 asymptotic SEs.
    std::vector<double> mean(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) mean[j] += data.y(i, j);
    for (auto& m : mean) m /= static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t q = j; q < p; ++q) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                acc += (data.y(i, j) - mean[j]) * (data.y(i, q) - mean[q]);
            const double chat = acc / static_cast<double>(n - 1);
            const double se = std::sqrt((omega0(j, j) * omega0(q, q) +
                                         omega0(j, q) * omega0(j, q)) /
                                        static_cast<double>(n));
            CHECK(std::fabs(chat - omega0(j, q)) <= 3.0 * se);
        }
}

TEST_CASE("aggregate_values: textbook quantiles") {
    const sim::Aggregate a = sim::aggregate_values({1, 2, 3, 4, 5});
    CHECK(a.median == doctest::Approx(3.0));
    CHECK(a.iqr == doctest::Approx(2.0));

    const sim::Aggregate single = sim::aggregate_values({4.2});
    CHECK(single.median == doctest::Approx(4.2));
    CHECK(single.iqr == 0.0);

    const sim::Aggregate shuffled = sim::aggregate_values({5, 3, 1, 4, 2});
    CHECK(shuffled.median == doctest::Approx(3.0));
    CHECK(shuffled.iqr == doctest::Approx(2.0));

    CHECK_THROWS_AS(sim::aggregate_values({}), EmptyResultError);
}

TEST_CASE("run_replicate is a pure function of (seed, replicate, method)") {
    sim::ScenarioSpec spec;
    spec.p = 5;
    spec.h0 = 2;
    spec.n = 25;
    spec.replicates = 3;
    spec.method = sim::Method::cusp;
    spec.settings = quick_settings();
    spec.master_seed = 99;

    const sim::ReplicateResult r1 = sim::run_replicate(spec, 1);
    const sim::ReplicateResult r2 = sim::run_replicate(spec, 1);
    CHECK(r1.ok);
    CHECK(r1.mse == r2.mse);
    CHECK(r1.mean_h_star == r2.mean_h_star);
    CHECK(r1.averaged_ess == r2.averaged_ess);

    spec.method = sim::Method::mgp;
    const sim::ReplicateResult m1 = sim::run_replicate(spec, 1);
    CHECK(m1.ok);
    CHECK(m1.mse != r1.mse);  // different chain stream per method
}

TEST_CASE("run_scenario: single replicate aggregates, worker-count invariance") {
    sim::ScenarioSpec spec;
    spec.p = 5;
    spec.h0 = 2;
    spec.n = 25;
    spec.replicates = 1;
    spec.settings = quick_settings();
    spec.master_seed = 11;
    spec.workers = 1;

    const sim::ScenarioResult one = sim::run_scenario(spec);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].ok);
    CHECK(one.mse.median == one.rows[0].mse);
    CHECK(one.mse.iqr == 0.0);
    CHECK(one.h_star.median == one.rows[0].mean_h_star);

    spec.replicates = 4;
    spec.workers = 1;
    const sim::ScenarioResult serial = sim::run_scenario(spec);
    spec.workers = 2;
    const sim::ScenarioResult parallel = sim::run_scenario(spec);
    REQUIRE(serial.rows.size() == 4);
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(serial.rows[r].ok);
        CHECK(serial.rows[r].mse == parallel.rows[r].mse);
        CHECK(serial.rows[r].mean_h_star == parallel.rows[r].mean_h_star);
        CHECK(serial.rows[r].averaged_ess == parallel.rows[r].averaged_ess);
    }

    const std::string table = sim::summarize_replicates(serial);
    CHECK(table.find("mse") != std::string::npos);
    CHECK(table.find("E(H*|y)") != std::string::npos);
    CHECK(table.find("runtime") != std::string::npos);
}

TEST_CASE("failed replicates are recorded, not dropped") {
    sim::ScenarioSpec spec;
    spec.p = 4;
    spec.h0 = 1;
    spec.n = 10;
    spec.replicates = 2;
    // Too few retained draws for the ESS estimator: every replicate fails in
    // the diagnostics stage and must be reported as failed.
    spec.settings = quick_settings(20, 10);
    spec.master_seed = 5;
    spec.workers = 1;

    const sim::ScenarioResult result = sim::run_scenario(spec);
    CHECK(result.failures == 2);
    for (const auto& row : result.rows) {
        CHECK_FALSE(row.ok);
        CHECK_FALSE(row.error.empty());
    }
    CHECK_THROWS_AS(sim::summarize_replicates(result), EmptyResultError);
}

TEST_CASE("scenario validation") {
    sim::ScenarioSpec spec;
    spec.h0 = 30;
    spec.p = 20;
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec.h0 = 5;
    spec.settings.burn_in = spec.settings.n_iterations;
    CHECK_THROWS_AS(spec.validate(), DomainError);
}
