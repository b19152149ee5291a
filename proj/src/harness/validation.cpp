#include "smcm/harness/validation.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "smcm/analysis.hpp"
#include "smcm/baselines.hpp"
#include "smcm/harness/experiment.hpp"
#include "smcm/oracles.hpp"

namespace smcm::harness {

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Scenario random_scenario(std::size_t m, std::size_t q, double snr_db, Rng& rng) {
    ScenarioDescription d;
    d.geometry.elements = m;
    d.snr_db = snr_db;
    d.sources.resize(q);
    return build_scenario(d, rng);
}

PropertyResult check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    PropertyResult r{name, false, ""};
    try {
        auto [ok, detail] = body();
        r.passed = ok;
        r.detail = detail;
    } catch (const std::exception& e) {
        r.detail = std::string("threw: ") + e.what();
    }
    return r;
}

ExperimentConfig small_config(std::uint64_t seed) {
    ExperimentConfig c;
    c.array.elements = 8;
    c.scenario.random_source_count = 3;
    c.scenario.snr_db = 15.0;
    c.scenario.snapshots = 200;
    c.run.runs = 6;
    c.run.master_seed = seed;
    AlgorithmConfig sm;
    sm.name = "sm_fixed";
    sm.type = AlgorithmType::SmCmGsc;
    sm.bound.gamma_fixed = 0.6;
    AlgorithmConfig pidb = sm;
    pidb.name = "sm_pidb";
    pidb.bound.kind = BoundKind::Pidb;
    AlgorithmConfig cm;
    cm.name = "cm";
    cm.type = AlgorithmType::CmGsc;
    c.algorithms = {sm, pidb, cm};
    return c;
}

}  // namespace

std::vector<PropertyResult> run_validation_suite(std::uint64_t seed) {
    std::vector<PropertyResult> out;
    Rng rng = make_stream(seed, 0, StreamPurpose::Analysis);

    out.push_back(check("blocking matrices annihilate the look direction", [&] {
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const Scenario s = random_scenario(16, 1, 15.0, rng);
            const CVector a0 = s.desired_steering();
            worst = std::max(worst, (blocking_css(a0).matrix * a0).norm());
            worst = std::max(worst, (blocking_nullspace(a0).matrix * a0).norm());
        }
        return std::pair{worst < 1e-12, "max |B a0| = " + num(worst)};
    }));

    out.push_back(check("SM updates land on the active boundary", [&] {
        double worst = 0.0;
        std::size_t updates = 0;
        for (int t = 0; t < 20; ++t) {
            const Scenario s = random_scenario(16, 4, 15.0, rng);
            const CVector a0 = s.desired_steering();
            BoundScheme scheme;
            scheme.kind = t % 3 == 0 ? BoundKind::Fixed : (t % 3 == 1 ? BoundKind::Pdb : BoundKind::Pidb);
            SmCmGsc f(GscState::with_unit_start(1.0, a0, blocking_css(a0)), scheme, s.noise_power);
            const SnapshotSource src(s);
            for (std::size_t i = 0; i < 500; ++i) {
                const double gamma = f.bound().gamma;
                const SmUpdateRecord rec = f.step(src.next(i, rng).received);
                if (!rec.updated) continue;
                ++updates;
                const double target = std::sqrt(1.0 + (std::norm(rec.y_prior) > 1.0 ? gamma : -gamma));
                worst = std::max(worst, std::abs(std::abs(rec.y_posterior) - target) / target);
            }
        }
        return std::pair{updates > 0 && worst < 1e-9, num(double(updates)) + " updates, worst rel err " + num(worst)};
    }));

    out.push_back(check("GSC and direct-form weights keep w~^H a0 = v", [&] {
        double worst = 0.0;
        const Scenario s = random_scenario(16, 5, 10.0, rng);
        const CVector a0 = s.desired_steering();
        BoundScheme scheme;
        scheme.kind = BoundKind::Pidb;
        SmCmGsc gsc(GscState::with_unit_start(1.0, a0, blocking_nullspace(a0)), scheme, s.noise_power);
        SmCmDfp dfp(1.0, a0, scheme, s.noise_power);
        const SnapshotSource src(s);
        for (std::size_t i = 0; i < 1000; ++i) {
            const CVector r = src.next(i, rng).received;
            gsc.step(r);
            dfp.step(r);
            worst = std::max(worst, std::abs(gsc.weights().dot(a0) - 1.0));
            worst = std::max(worst, std::abs(dfp.weights().dot(a0) - 1.0));
        }
        return std::pair{worst < 1e-9, "max |w~^H a0 - v| = " + num(worst)};
    }));

    out.push_back(check("Hessian matches finite differences", [&] {
        double worst = 0.0;
        for (int t = 0; t < 5; ++t) {
            const Scenario s = random_scenario(6, 3, 10.0, rng);
            std::normal_distribution<double> g(0.0, 0.5);
            CVector w(6);
            for (auto& x : w) x = Complex(g(rng), g(rng));
            const CMatrix M = cm_hessian(w, s, 1.0);
            const CMatrix F = oracles::finite_difference_hessian(
                [&](const CVector& x) { return oracles::cm_cost_model(x, s, 1.0); }, w);
            worst = std::max(worst, (M - F).cwiseAbs().maxCoeff() / std::max(1.0, F.cwiseAbs().maxCoeff()));
        }
        return std::pair{worst < 1e-4, "worst relative deviation " + num(worst)};
    }));

    out.push_back(check("noiseless CM-GSC cost is convex for v^2 >= 1/2", [&] {
        Scenario s = random_scenario(8, 4, 15.0, rng);
        s.noise_power = 0.0;
        const double low = convexity_probe(s, std::sqrt(0.5), 100, 2.0, rng);
        return std::pair{low >= -1e-8, "min eigenvalue " + num(low)};
    }));

    out.push_back(check("fourth moment identity on phase-balanced gains", [&] {
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const CVector s = oracles::phase_balanced_gains(2 + t % 8, rng);
            const double a = fourth_moment_paper(s);
            worst = std::max(worst, std::abs(a - fourth_moment_bruteforce(s)) / a);
        }
        CVector co(2);
        co << 1.0, 1.0;
        const bool gap = fourth_moment_paper(co) == 6.0 && fourth_moment_bruteforce(co) == 8.0;
        return std::pair{worst < 1e-12 && gap, "worst rel err " + num(worst) + ", [1,1] gives 6 vs 8"};
    }));

    out.push_back(check("SINR is invariant to complex scaling of w~", [&] {
        const Scenario s = random_scenario(16, 4, 15.0, rng);
        CVector w = CVector::Random(16);
        const double a = sinr_of(w, s, 0);
        const double b = sinr_of(w * Complex(-2.5, 0.7), s, 0);
        return std::pair{std::abs(a - b) < 1e-9, num(a) + " dB vs " + num(b) + " dB"};
    }));

    const ExperimentConfig cfg = small_config(seed);
    ExperimentConfig one = cfg;
    one.run.threads = 1;
    ExperimentConfig many = cfg;
    many.run.threads = 4;
    const ExperimentResult r1 = run_experiment(one);
    const ExperimentResult r4 = run_experiment(many);

    out.push_back(check("results are identical for 1 and 4 workers", [&] {
        return std::pair{format_csv(r1.series) == format_csv(r4.series), "CSV byte comparison"};
    }));

    out.push_back(check("all algorithms consume the same snapshot stream", [&] {
        bool ok = true;
        for (const auto& run : r1.runs) {
            for (const auto& a : run.algorithms) ok = ok && a.stream_checksum == run.algorithms.front().stream_checksum;
        }
        return std::pair{ok, "per-run checksums compared"};
    }));

    out.push_back(check("update rate equals the update-event count ratio", [&] {
        double worst = 0.0;
        for (std::size_t k = 0; k < r1.series.size(); ++k) {
            std::uint64_t events = 0;
            for (const auto& run : r1.runs) events += run.algorithms[k].updates;
            const double expect = double(events) / double(r1.run_count() * r1.snapshots);
            worst = std::max(worst, std::abs(r1.series[k].update_rate.back() - expect));
        }
        return std::pair{worst < 1e-12, "max deviation " + num(worst)};
    }));

    out.push_back(check("per-snapshot cost is 2m + eta m for SM-CM-GSC and 3m for CM-GSC", [&] {
        const double m = double(cfg.array.elements);
        const double total = double(r1.run_count() * r1.snapshots);
        const double eta = r1.series[0].update_rate.back();
        const double sm = double(r1.series[0].total_mults) / total;
        const double cm = double(r1.series[2].total_mults) / total;
        const bool ok = std::abs(sm - (2.0 * m + eta * m)) < 1e-9 && std::abs(cm - 3.0 * m) < 1e-9;
        return std::pair{ok, "SM " + num(sm) + " vs " + num(2.0 * m + eta * m) + ", CM " + num(cm)};
    }));

    return out;
}

}  // namespace smcm::harness
