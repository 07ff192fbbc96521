#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "cusp/diagnostics.hpp"
#include "cusp/errors.hpp"
#include "cusp/gibbs_cusp.hpp"
#include "cusp/gibbs_mgp.hpp"
#include "cusp/io.hpp"
#include "cusp/io_format.hpp"
#include "cusp/kernels.hpp"
#include "cusp/sim_harness.hpp"

namespace cusp::io {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct HyperFlags {
    double alpha = 5.0, a_theta = 2.0, b_theta = 2.0, theta_inf = 0.05;
    double a_sigma = 1.0, b_sigma = 0.3;
    double a1 = 1.0, a2 = 2.0, nu = 3.0, eps_threshold = 1e-4;
    std::size_t iterations = 15000, burn_in = 5000, thin = 5, adapt_start = 500;
    double alpha0 = -1.0, alpha1 = -5e-4;
};

void add_hyper_options(CLI::App* cmd, HyperFlags& f) {
    cmd->add_option("--alpha", f.alpha, "CUSP alpha (expected active factors)");
    cmd->add_option("--a-theta", f.a_theta, "slab shape");
    cmd->add_option("--b-theta", f.b_theta, "slab rate");
    cmd->add_option("--theta-inf", f.theta_inf, "spike location");
    cmd->add_option("--a-sigma", f.a_sigma, "idiosyncratic variance shape");
    cmd->add_option("--b-sigma", f.b_sigma, "idiosyncratic variance rate");
    cmd->add_option("--a1", f.a1, "MGP first increment shape");
    cmd->add_option("--a2", f.a2, "MGP later increment shape");
    cmd->add_option("--nu", f.nu, "MGP local scale degrees of freedom");
    cmd->add_option("--eps-threshold", f.eps_threshold, "MGP inactivity threshold");
    cmd->add_option("--iterations", f.iterations, "total Gibbs iterations");
    cmd->add_option("--burn-in", f.burn_in, "burn-in iterations");
    cmd->add_option("--thin", f.thin, "thinning stride");
    cmd->add_option("--adapt-start", f.adapt_start, "first adaptive iteration");
    cmd->add_option("--alpha0", f.alpha0, "adaptation probability intercept");
    cmd->add_option("--alpha1", f.alpha1, "adaptation probability slope");
}

FactorHyper to_factor_hyper(const HyperFlags& f) {
    if (!(f.a_theta > 1.0))
        throw ConfigError(
            "a_theta must exceed 1: the covariance prior needs a finite slab mean, "
            "E(theta_h) < infinity");
    FactorHyper h;
    h.cusp = prior::CuspHyper{f.alpha, f.a_theta, f.b_theta, f.theta_inf};
    h.a_sigma = f.a_sigma;
    h.b_sigma = f.b_sigma;
    return h;
}

mgp::MgpHyper to_mgp_hyper(const HyperFlags& f) {
    return mgp::MgpHyper{f.a1, f.a2, f.nu, f.a_sigma, f.b_sigma, f.eps_threshold};
}

McmcSettings to_settings(const HyperFlags& f, std::uint64_t seed) {
    McmcSettings s;
    s.n_iterations = f.iterations;
    s.burn_in = f.burn_in;
    s.thin = f.thin;
    s.adapt_start = f.adapt_start;
    s.alpha0 = f.alpha0;
    s.alpha1 = f.alpha1;
    s.seed = seed;
    return s;
}

sim::Method parse_method(const std::string& name) {
    if (name == "cusp") return sim::Method::cusp;
    if (name == "mgp") return sim::Method::mgp;
    throw ConfigError("unknown method \"" + name + "\" (expected cusp or mgp)");
}

// Applies a key=value config file onto the flag struct. Explicit command-line
// flags are applied after this and win.
void apply_config_file(const std::string& path, HyperFlags& f, std::string& method,
                       std::uint64_t& seed) {
    const auto kv = read_kv(path);
    for (const auto& [key, value] : kv) {
        if (key == "method") method = value;
        else if (key == "seed") seed = std::stoull(value);
        else if (key == "alpha") f.alpha = parse_double(value);
        else if (key == "a_theta") f.a_theta = parse_double(value);
        else if (key == "b_theta") f.b_theta = parse_double(value);
        else if (key == "theta_inf") f.theta_inf = parse_double(value);
        else if (key == "a_sigma") f.a_sigma = parse_double(value);
        else if (key == "b_sigma") f.b_sigma = parse_double(value);
        else if (key == "a1") f.a1 = parse_double(value);
        else if (key == "a2") f.a2 = parse_double(value);
        else if (key == "nu") f.nu = parse_double(value);
        else if (key == "eps_threshold") f.eps_threshold = parse_double(value);
        else if (key == "iterations") f.iterations = std::stoull(value);
        else if (key == "burn_in") f.burn_in = std::stoull(value);
        else if (key == "thin") f.thin = std::stoull(value);
        else if (key == "adapt_start") f.adapt_start = std::stoull(value);
        else if (key == "alpha0") f.alpha0 = parse_double(value);
        else if (key == "alpha1") f.alpha1 = parse_double(value);
        else throw ConfigError("config file: unknown key \"" + key + "\"");
    }
}

void warn_if_ordering_broken(const FactorHyper& hyper) {
    if (!hyper.cusp.shrinkage_ordering_ok())
        std::cerr << "warning: b_theta/a_theta <= theta_inf breaks the cumulative "
                     "shrinkage ordering of the loadings\n";
}

int cmd_simulate(const sim::ScenarioSpec& spec, const std::string& out_dir) {
    warn_if_ordering_broken(spec.hyper);
    const sim::ScenarioResult result = sim::run_scenario(spec);
    if (result.failures == result.rows.size()) {
        for (const auto& row : result.rows)
            std::cerr << "replicate " << row.index << " failed: " << row.error << "\n";
        throw NumericalError("simulate: every replicate failed");
    }

    fs::create_directories(out_dir);

    std::ofstream tsv(fs::path(out_dir) / "results.tsv");
    tsv << "replicate\tstatus\tmse\tmean_h_star\taveraged_ess\n";
    for (const auto& row : result.rows) {
        tsv << row.index << '\t' << (row.ok ? "ok" : "failed") << '\t';
        if (row.ok)
            tsv << format_double(row.mse) << '\t' << format_double(row.mean_h_star)
                << '\t' << format_double(row.averaged_ess) << '\n';
        else
            tsv << "nan\tnan\tnan\n";
    }
    tsv.close();

    json summary;
    summary["scenario"] = {{"p", spec.p},
                           {"h0", spec.h0},
                           {"n", spec.n},
                           {"replicates", spec.replicates},
                           {"method", sim::method_name(spec.method)},
                           {"master_seed", spec.master_seed}};
    summary["aggregates"] = {
        {"mse", {{"median", result.mse.median}, {"iqr", result.mse.iqr}}},
        {"h_star", {{"median", result.h_star.median}, {"iqr", result.h_star.iqr}}},
        {"averaged_ess",
         {{"median", result.averaged_ess.median}, {"iqr", result.averaged_ess.iqr}}}};
    json reps = json::array();
    for (const auto& row : result.rows) {
        json r = {{"replicate", row.index}, {"ok", row.ok}};
        if (row.ok) {
            r["mse"] = row.mse;
            r["mean_h_star"] = row.mean_h_star;
            r["averaged_ess"] = row.averaged_ess;
        } else {
            r["error"] = row.error;
        }
        reps.push_back(r);
    }
    summary["replicates"] = reps;
    std::ofstream js(fs::path(out_dir) / "summary.json");
    js << summary.dump(2) << "\n";
    js.close();

    std::map<std::string, std::string> manifest;
    manifest["command"] = "simulate";
    manifest["p"] = std::to_string(spec.p);
    manifest["h0"] = std::to_string(spec.h0);
    manifest["n"] = std::to_string(spec.n);
    manifest["replicates"] = std::to_string(spec.replicates);
    manifest["method"] = sim::method_name(spec.method);
    manifest["master_seed"] = std::to_string(spec.master_seed);
    manifest["alpha"] = format_double(spec.hyper.cusp.alpha);
    manifest["a_theta"] = format_double(spec.hyper.cusp.a_theta);
    manifest["b_theta"] = format_double(spec.hyper.cusp.b_theta);
    manifest["theta_inf"] = format_double(spec.hyper.cusp.theta_inf);
    manifest["a_sigma"] = format_double(spec.hyper.a_sigma);
    manifest["b_sigma"] = format_double(spec.hyper.b_sigma);
    manifest["a1"] = format_double(spec.mgp_hyper.a1);
    manifest["a2"] = format_double(spec.mgp_hyper.a2);
    manifest["nu"] = format_double(spec.mgp_hyper.nu);
    manifest["eps_threshold"] = format_double(spec.mgp_hyper.eps_threshold);
    manifest["n_iterations"] = std::to_string(spec.settings.n_iterations);
    manifest["burn_in"] = std::to_string(spec.settings.burn_in);
    manifest["thin"] = std::to_string(spec.settings.thin);
    manifest["adapt_start"] = std::to_string(spec.settings.adapt_start);
    manifest["alpha0"] = format_double(spec.settings.alpha0);
    manifest["alpha1"] = format_double(spec.settings.alpha1);
    char hashbuf[24];
    std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                  static_cast<unsigned long long>(manifest_hash(manifest)));
    manifest["config_hash"] = hashbuf;
    write_kv((fs::path(out_dir) / "manifest.txt").string(), manifest);

    // Wall-clock runtimes stay on the console; persisted files must be
    // reproducible bit for bit.
    std::cout << sim::summarize_replicates(result);
    std::cout << "outputs written to " << out_dir << "\n";
    return 0;
}

int cmd_fit(const std::string& data_path, const PreprocessSpec& preprocess,
            const std::string& method_name, const HyperFlags& flags, std::uint64_t seed,
            const std::string& out_dir, double level) {
    const sim::Method method = parse_method(method_name);
    const Dataset data = load_csv(data_path, preprocess);

    const McmcSettings settings = to_settings(flags, seed);
    const RngStream root(seed);
    RngStream chain_rng = root.split(0);

    DrawStore draws;
    std::vector<AdaptationEvent> adapt_log;
    if (method == sim::Method::cusp) {
        const FactorHyper hyper = to_factor_hyper(flags);
        hyper.validate();
        warn_if_ordering_broken(hyper);
        draws = run_chain(data, hyper, settings, chain_rng, &adapt_log);
    } else {
        const mgp::MgpHyper hyper = to_mgp_hyper(flags);
        draws = mgp::run_chain_mgp(data, hyper, settings, chain_rng);
    }

    draws.manifest["command"] = "fit";
    draws.manifest["data_path"] = data_path;
    draws.manifest["center"] = preprocess.center ? "1" : "0";
    std::string negated;
    for (std::size_t idx : preprocess.negate_columns) {
        if (!negated.empty()) negated += ",";
        negated += std::to_string(idx);
    }
    draws.manifest["negate_columns"] = negated;
    write_draws(draws, out_dir);

    std::vector<double> hs(draws.h_star.begin(), draws.h_star.end());
    double mean_hs = 0.0;
    for (double v : hs) mean_hs += v;
    mean_hs /= static_cast<double>(hs.size());
    const auto [lo, hi] = diag::credible_interval(hs, level);

    std::printf("retained draws: %zu\n", draws.size());
    std::printf("posterior mean H*: %.4f\n", mean_hs);
    std::printf("%.0f%% credible interval for H*: (%g, %g)\n", level * 100.0, lo, hi);
    if (!adapt_log.empty()) {
        const auto& last = adapt_log.back();
        std::printf("adaptations: %zu (final H = %zu, E(pi_H) = %.6f)\n",
                    adapt_log.size(), last.new_trunc, last.expected_pi_at_trunc);
    }
    std::printf("draws written to %s\n", out_dir.c_str());
    return 0;
}

int cmd_summarize(const std::string& draws_dir, double level,
                  const std::string& data_path, const PreprocessSpec& preprocess) {
    const DrawStore draws = read_draws(draws_dir);
    if (draws.size() == 0) throw EmptyResultError("summarize: draw store is empty");

    std::vector<double> hs(draws.h_star.begin(), draws.h_star.end());
    double mean_hs = 0.0;
    for (double v : hs) mean_hs += v;
    mean_hs /= static_cast<double>(hs.size());
    const auto [lo, hi] = diag::credible_interval(hs, level);

    std::printf("draws: %zu  p: %zu\n", draws.size(), draws.p);
    std::printf("posterior mean H*: %.4f\n", mean_hs);
    std::printf("%.0f%% credible interval for H*: (%g, %g)\n", level * 100.0, lo, hi);

    const Matrix corr = diag::posterior_mean_correlation(draws);
    std::printf("posterior mean correlation matrix:\n");
    for (std::size_t j = 0; j < corr.rows(); ++j) {
        for (std::size_t q = 0; q < corr.cols(); ++q)
            std::printf("%s%.6f", q ? " " : "", corr(j, q));
        std::printf("\n");
    }

    if (!data_path.empty()) {
        const Dataset data = load_csv(data_path, preprocess);
        if (data.p() != draws.p)
            throw ShapeError("summarize: data column count differs from draws");
        const Matrix s = diag::sample_correlation(data.y);
        std::printf("mean squared deviation from sample correlation: %.6f\n",
                    diag::mean_sq_dev_from_sample_corr(draws, s));
    }
    return 0;
}

int cmd_prior_check(double alpha, double a_theta, double b_theta, double theta_inf,
                    unsigned h_max, const std::vector<unsigned>& truncs, double eps) {
    const prior::CuspHyper hyper{alpha, a_theta, b_theta, theta_inf};
    hyper.validate();
    const double theta0 = hyper.slab_mean();  // requires a_theta > 1

    std::printf("E(H*) = %g\n", prior::expected_active(alpha));
    const double mass_near_spike = prior::invgamma_outside_mass(hyper, eps);
    std::printf("slab mass outside |theta - theta_inf| <= %g: %.10f\n", eps,
                mass_near_spike);
    std::printf("%4s %14s %14s %26s\n", "h", "E(pi_h)", "E(theta_h)",
                "pr(|theta_h-theta_inf|>eps)");
    for (unsigned h = 1; h <= h_max; ++h)
        std::printf("%4u %14.8f %14.8f %26.10f\n", h, prior::expected_pi(alpha, h),
                    prior::expected_theta(alpha, h, theta0, theta_inf),
                    prior::tail_prob(alpha, h, mass_near_spike));

    if (eps >= theta_inf) {
        const double mass_zero = prior::invgamma_mass_above(a_theta, b_theta, eps);
        std::printf("truncation bound pr{sup_{h>H} |theta_h| > %g}:\n", eps);
        for (unsigned tr : truncs)
            std::printf("  H=%-4u %.10g\n", tr,
                        prior::truncation_bound(alpha, tr, mass_zero));
    } else {
        std::printf("truncation bound requires eps >= theta_inf; skipped\n");
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Gaussian factor models under the cumulative shrinkage process"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string kernels_choice = "auto";
    app.add_option("--kernels", kernels_choice,
                   "kernel backend: auto, scalar or avx2")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run a synthetic-data scenario");
    sim::ScenarioSpec spec;
    std::string sim_method = "cusp", sim_out;
    HyperFlags sim_flags;
    std::uint64_t sim_seed = 1;
    sim_cmd->add_option("--p", spec.p, "variable count");
    sim_cmd->add_option("--h0", spec.h0, "true factor count");
    sim_cmd->add_option("--n", spec.n, "observations per replicate");
    sim_cmd->add_option("--replicates", spec.replicates, "replicate count");
    sim_cmd->add_option("--method", sim_method, "cusp or mgp");
    sim_cmd->add_option("--seed", sim_seed, "master seed");
    sim_cmd->add_option("--workers", spec.workers, "parallel replicates (0 = auto)");
    sim_cmd->add_option("--out", sim_out, "output directory")->required();
    add_hyper_options(sim_cmd, sim_flags);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit a CSV dataset");
    std::string fit_data, fit_method = "cusp", fit_out, fit_config;
    HyperFlags fit_flags;
    std::uint64_t fit_seed = 1;
    bool fit_center = false;
    std::vector<std::size_t> fit_negate;
    double fit_level = 0.95;
    fit_cmd->add_option("--data", fit_data, "CSV file (header row, numeric cells)")
        ->required();
    fit_cmd->add_option("--method", fit_method, "cusp or mgp");
    fit_cmd->add_option("--config", fit_config, "key=value config file");
    fit_cmd->add_option("--seed", fit_seed, "chain seed");
    fit_cmd->add_option("--out", fit_out, "draws output directory")->required();
    fit_cmd->add_flag("--center", fit_center, "subtract column means");
    fit_cmd->add_option("--negate", fit_negate, "1-based columns to negate first")
        ->delimiter(',');
    fit_cmd->add_option("--level", fit_level, "credible level for the H* interval");
    add_hyper_options(fit_cmd, fit_flags);

    // summarize
    auto* sum_cmd = app.add_subcommand("summarize", "summarize persisted draws");
    std::string sum_draws, sum_data;
    double sum_level = 0.95;
    bool sum_center = false;
    std::vector<std::size_t> sum_negate;
    sum_cmd->add_option("--draws", sum_draws, "draws directory")->required();
    sum_cmd->add_option("--level", sum_level, "credible level");
    sum_cmd->add_option("--data", sum_data,
                        "CSV file for the sample-correlation comparison");
    sum_cmd->add_flag("--center", sum_center, "center the comparison data");
    sum_cmd->add_option("--negate", sum_negate, "1-based columns to negate first")
        ->delimiter(',');

    // prior-check
    auto* prior_cmd = app.add_subcommand("prior-check", "closed-form prior tables");
    double pc_alpha = 5.0, pc_a = 2.0, pc_b = 2.0, pc_tinf = 0.05, pc_eps = 0.1;
    unsigned pc_hmax = 10;
    std::vector<unsigned> pc_truncs = {5, 10, 20};
    prior_cmd->add_option("--alpha", pc_alpha, "CUSP alpha")->required();
    prior_cmd->add_option("--a-theta", pc_a, "slab shape");
    prior_cmd->add_option("--b-theta", pc_b, "slab rate");
    prior_cmd->add_option("--theta-inf", pc_tinf, "spike location");
    prior_cmd->add_option("--h-max", pc_hmax, "largest h in the table");
    prior_cmd->add_option("--trunc", pc_truncs, "truncation levels for the tail bound")
        ->delimiter(',');
    prior_cmd->add_option("--eps", pc_eps, "neighborhood radius");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (kernels_choice == "scalar") kernels::set_backend(kernels::Backend::scalar);
        else if (kernels_choice == "avx2") {
            if (!kernels::set_backend(kernels::Backend::avx2))
                throw ConfigError("avx2 kernels are not supported on this CPU");
        } else {
            kernels::set_backend_auto();
        }

        if (app.got_subcommand(sim_cmd)) {
            spec.method = parse_method(sim_method);
            spec.hyper = to_factor_hyper(sim_flags);
            spec.mgp_hyper = to_mgp_hyper(sim_flags);
            spec.settings = to_settings(sim_flags, sim_seed);
            spec.master_seed = sim_seed;
            return cmd_simulate(spec, sim_out);
        }
        if (app.got_subcommand(fit_cmd)) {
            std::string method = fit_method;
            std::uint64_t seed = fit_seed;
            HyperFlags flags = fit_flags;
            if (!fit_config.empty()) {
                HyperFlags file_flags;
                std::string file_method = method;
                std::uint64_t file_seed = seed;
                apply_config_file(fit_config, file_flags, file_method, file_seed);
                // Explicit flags override the file.
                auto keep = [&](const char* name, auto& target, const auto& parsed) {
                    if (fit_cmd->count(name)) target = parsed;
                };
                flags = file_flags;
                method = file_method;
                seed = file_seed;
                keep("--method", method, fit_method);
                keep("--seed", seed, fit_seed);
                keep("--alpha", flags.alpha, fit_flags.alpha);
                keep("--a-theta", flags.a_theta, fit_flags.a_theta);
                keep("--b-theta", flags.b_theta, fit_flags.b_theta);
                keep("--theta-inf", flags.theta_inf, fit_flags.theta_inf);
                keep("--a-sigma", flags.a_sigma, fit_flags.a_sigma);
                keep("--b-sigma", flags.b_sigma, fit_flags.b_sigma);
                keep("--a1", flags.a1, fit_flags.a1);
                keep("--a2", flags.a2, fit_flags.a2);
                keep("--nu", flags.nu, fit_flags.nu);
                keep("--eps-threshold", flags.eps_threshold, fit_flags.eps_threshold);
                keep("--iterations", flags.iterations, fit_flags.iterations);
                keep("--burn-in", flags.burn_in, fit_flags.burn_in);
                keep("--thin", flags.thin, fit_flags.thin);
                keep("--adapt-start", flags.adapt_start, fit_flags.adapt_start);
                keep("--alpha0", flags.alpha0, fit_flags.alpha0);
                keep("--alpha1", flags.alpha1, fit_flags.alpha1);
            }
            PreprocessSpec preprocess{fit_center, fit_negate};
            return cmd_fit(fit_data, preprocess, method, flags, seed, fit_out,
                           fit_level);
        }
        if (app.got_subcommand(sum_cmd)) {
            PreprocessSpec preprocess{sum_center, sum_negate};
            return cmd_summarize(sum_draws, sum_level, sum_data, preprocess);
        }
        if (app.got_subcommand(prior_cmd)) {
            return cmd_prior_check(pc_alpha, pc_a, pc_b, pc_tinf, pc_hmax, pc_truncs,
                                   pc_eps);
        }
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace cusp::io
