#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "smcm/harness/config.hpp"
#include "smcm/harness/experiment.hpp"
#include "smcm/harness/validation.hpp"

using namespace smcm;
using namespace smcm::harness;

namespace {

int cmd_run(const std::string& path, std::optional<std::size_t> runs, std::optional<std::uint64_t> seed,
            const std::string& out, std::optional<std::size_t> threads) {
    ExperimentConfig cfg = load_config(path);
    if (runs) {
        if (*runs < 1) throw Error(ErrorKind::Config, "--runs: must be >= 1");
        cfg.run.runs = *runs;
    }
    if (seed) cfg.run.master_seed = *seed;
    if (threads) cfg.run.threads = *threads;
    const std::string csv = out.empty() ? cfg.outputs.csv_path : out;
    if (csv.empty()) throw Error(ErrorKind::Config, "outputs.csv_path: no output path (use --out)");

    const ExperimentResult res = run_experiment(cfg);
    write_csv(res.series, csv);
    const std::size_t n = res.snapshots;
    std::printf("%zu runs x %zu snapshots -> %s\n", res.run_count(), n, csv.c_str());
    for (const auto& s : res.series) {
        const double mults = double(s.total_mults) / double(res.run_count() * n);
        std::printf("  %-20s final SINR %7.2f dB  update rate %6.2f%%  mults/snapshot %.1f\n", s.algorithm.c_str(),
                    s.mean_sinr_db.back(), 100.0 * s.update_rate.back(), mults);
    }
    return 0;
}

int cmd_analyze(const std::string& path, const std::string& out, std::optional<std::size_t> runs) {
    ExperimentConfig cfg = load_config(path);
    if (runs) cfg.run.runs = *runs;
    const std::string csv = out.empty() ? cfg.outputs.analysis_path : out;
    if (csv.empty()) throw Error(ErrorKind::Config, "outputs.analysis_path: no output path (use --out)");
    const auto rows = run_analysis(cfg);
    write_analysis_csv(rows, csv);
    std::printf("%-14s %6s %3s %10s %10s %10s %9s %9s %6s\n", "scheme", "snr", "q", "xi_pred", "xi_sim", "diff_dB",
                "p_pred", "eta_sim", "domain");
    for (const auto& r : rows) {
        const double diff = 10.0 * std::log10(r.xi_total_pred / r.xi_total_sim);
        std::printf("%-14s %6.1f %3zu %10.4g %10.4g %10.3g %9.4f %9.4f %5.0f%%\n", r.scheme.c_str(), r.snr_db, r.q,
                    r.xi_total_pred, r.xi_total_sim, diff, r.p_update_pred, r.update_rate_sim,
                    100.0 * r.in_domain_fraction);
    }
    return 0;
}

int cmd_validate(std::uint64_t seed) {
    const auto results = run_validation_suite(seed);
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s  %s (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        failed += r.passed ? 0 : 1;
    }
    std::printf("%zu properties, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Set-membership constant-modulus beamforming experiments"};
    app.require_subcommand(1);

    std::string config, out;
    std::optional<std::size_t> runs, threads;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Monte Carlo simulation; writes the metric CSV");
    run->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--runs", runs, "override run.runs");
    run->add_option("--seed", seed, "override run.master_seed");
    run->add_option("--out", out, "CSV path (default outputs.csv_path)");
    run->add_option("--threads", threads, "worker threads (0: all cores)");

    auto* analyze = app.add_subcommand("analyze", "steady-state predictions next to matched simulation");
    analyze->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    analyze->add_option("--out", out, "CSV path (default outputs.analysis_path)");
    analyze->add_option("--runs", runs, "override run.runs");

    std::uint64_t validate_seed = 1;
    auto* validate = app.add_subcommand("validate", "run the invariant suite");
    validate->add_option("--seed", validate_seed, "seed for the random scenarios");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(config, runs, seed, out, threads);
        if (*analyze) return cmd_analyze(config, out, runs);
        if (*validate) return cmd_validate(validate_seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
