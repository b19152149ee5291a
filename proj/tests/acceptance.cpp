// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "smcm/analysis.hpp"
#include "smcm/baselines.hpp"
#include "smcm/gsc_core.hpp"
#include "smcm/harness/config.hpp"
#include "smcm/harness/experiment.hpp"
#include "smcm/oracles.hpp"
#include "smcm/sm_adaptive.hpp"

using namespace smcm;
using namespace smcm::harness;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

ExperimentConfig preset(const std::string& name) {
    return load_config(std::string(SMCM_SOURCE_DIR "/configs/") + name + ".json");
}

const MetricSeries& series(const ExperimentResult& r, const std::string& name) {
    for (const auto& s : r.series) {
        if (s.algorithm == name) return s;
    }
    throw Error(ErrorKind::InvalidState, "no series named " + name);
}

bool is_adaptive(const ExperimentConfig& cfg, const std::string& name) {
    for (const auto& a : cfg.algorithms) {
        if (a.name == name) return a.type != AlgorithmType::Mvdr;
    }
    return false;
}

Scenario random_scenario(std::size_t q, double snr_db, Rng& rng) {
    ScenarioDescription d;
    d.snr_db = snr_db;
    d.sources.resize(q);
    return build_scenario(d, rng);
}

Outcome ac1_projection() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng = make_stream(101, 0, StreamPurpose::Analysis);
    std::size_t updates = 0;
    double worst = 0.0;
    for (std::size_t t = 0; updates < 100000; ++t) {
        const Scenario s = random_scenario(2 + t % 8, 5.0 + 5.0 * double(t % 4), rng);
        const CVector a0 = s.desired_steering();
        BoundScheme scheme;
        scheme.kind = t % 3 == 0 ? BoundKind::Fixed : (t % 3 == 1 ? BoundKind::Pdb : BoundKind::Pidb);
        scheme.gamma_fixed = 0.1 + 0.1 * double(t % 8);
        const BlockingMatrix B = t % 2 == 0 ? blocking_css(a0) : blocking_nullspace(a0);
        SmCmGsc f(GscState::with_unit_start(1.0, a0, B), scheme, s.noise_power);
        const SnapshotSource src(s);
        for (std::size_t i = 0; i < 1500; ++i) {
            const double gamma = f.bound().gamma;
            const SmUpdateRecord rec = f.step(src.next(i, rng).received);
            if (!rec.updated) continue;
            ++updates;
            const double target = std::sqrt(1.0 + (std::norm(rec.y_prior) > 1.0 ? gamma : -gamma));
            worst = std::max(worst, std::abs(std::abs(rec.y_posterior) - target) / target);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst <= 1e-9 && secs < 60.0,
            std::to_string(updates) + " updates, worst rel err " + fmt("%.2e", worst) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome ac2_update_rates() {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg = preset("fig1_bounds");
    cfg.run.runs = 200;
    const ExperimentResult r = run_experiment(cfg);
    const std::vector<std::pair<std::string, double>> targets = {
        {"sm_cm_gsc_fixed_0.1", 0.729}, {"sm_cm_gsc_fixed_0.6", 0.276}, {"sm_cm_gsc_fixed_0.8", 0.148},
        {"sm_cm_gsc_pidb", 0.224},      {"sm_cm_gsc_pdb", 0.265}};
    bool ok = true;
    std::string detail;
    for (const auto& [name, want] : targets) {
        const double got = series(r, name).update_rate.back();
        const bool hit = std::abs(got - want) <= 0.05;
        ok = ok && hit;
        detail += name + " " + fmt("%.1f%%", 100 * got) + " (want " + fmt("%.1f%%", 100 * want) + (hit ? ")" : ", miss)") + "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {ok && secs < 600.0, detail + fmt("%.0f s", secs)};
}

Outcome ac3_ordering() {
    bool ok = true;
    std::string detail;
    const std::vector<std::string> order = {"sm_cm_gsc_pidb", "sm_cm_gsc_pdb", "sm_cm_gsc_fixed_0.6", "cm_gsc", "mv_gsc"};
    for (const char* name : {"fig2_q6", "fig3_q9"}) {
        const ExperimentConfig cfg = preset(name);
        const ExperimentResult r = run_experiment(cfg);
        const std::size_t at = 999;
        std::vector<double> v;
        for (const auto& n : order) v.push_back(series(r, n).mean_sinr_db[at]);
        detail += std::string(name) + ":";
        for (std::size_t k = 0; k < order.size(); ++k) detail += " " + fmt("%.2f", v[k]);
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            if (v[k] < v[k + 1] - 0.2) {
                ok = false;
                detail += " [" + order[k] + " < " + order[k + 1] + "]";
            }
        }
        const double gain = v[0] - v[3];
        if (gain < 0.5) ok = false;
        const double mvdr = series(r, "mvdr").mean_sinr_db[at];
        const double best = *std::max_element(v.begin(), v.end());
        if (mvdr <= best) ok = false;
        detail += ", PIDB-CM " + fmt("%.2f dB", gain) + ", MVDR " + fmt("%.2f", mvdr) + "; ";
    }
    return {ok, detail};
}

Outcome ac4_tracking() {
    const ExperimentConfig cfg = preset("fig4_nonstationary");
    const ExperimentResult r = run_experiment(cfg);
    const std::size_t onset = cfg.scenario.nonstationary.front().onset;
    const std::size_t last = cfg.scenario.snapshots - 1;
    bool ok = true;
    std::string detail;
    double best_other = -1e300;
    double pidb = 0.0;
    for (const auto& s : r.series) {
        const double before = s.mean_sinr_db[onset - 1];
        const double trough = *std::min_element(s.mean_sinr_db.begin() + onset, s.mean_sinr_db.end());
        const double end = s.mean_sinr_db[last];
        const bool drop = trough < before;
        const bool adaptive = is_adaptive(cfg, s.algorithm);
        const bool recover = !adaptive || end > trough;
        ok = ok && drop && recover;
        detail += s.algorithm + " " + fmt("%.2f", before) + "->" + fmt("%.2f", trough) + "->" + fmt("%.2f", end) + "; ";
        if (!adaptive) continue;
        if (s.algorithm == "sm_cm_gsc_pidb") {
            pidb = end;
        } else {
            best_other = std::max(best_other, end);
        }
    }
    if (pidb < best_other - 0.2) ok = false;
    return {ok, detail + "PIDB margin " + fmt("%.2f dB", pidb - best_other)};
}

Outcome ac5_prediction() {
    bool ok = true;
    std::string detail;
    for (const char* name : {"fig6_pidb_q3", "fig7_pdb_q4"}) {
        const ExperimentConfig cfg = preset(name);
        for (const AnalysisRow& row : run_analysis(cfg)) {
            const double pred = linear_to_db(row.xi_total_pred);
            const double sim = linear_to_db(row.xi_total_sim);
            const double diff = std::abs(pred - sim);
            const bool hit = std::isfinite(diff) && diff <= 1.5;
            ok = ok && hit;
            detail += std::string(name) + "@" + fmt("%.0f", row.snr_db) + " pred " + fmt("%.2f", pred) + " sim " +
                      fmt("%.2f", sim) + " dB (in-domain " + fmt("%.0f%%", 100 * row.in_domain_fraction) + "); ";
        }
    }
    return {ok, detail};
}

// Shared by the oracle-equivalence and stability criteria.
struct ConvergedRuns {
    ExperimentConfig cfg;
    ExperimentResult result;
};

const ConvergedRuns& converged_runs() {
    static const ConvergedRuns runs = [] {
        ConvergedRuns out;
        ExperimentConfig& c = out.cfg;
        c.array.elements = 16;
        c.scenario.snr_db = 15.0;
        c.scenario.random_source_count = 3;
        c.scenario.snapshots = 5000;
        c.run.runs = 40;
        c.run.master_seed = 6;
        AlgorithmConfig sm;
        sm.name = "sm_cm_gsc_pidb";
        sm.type = AlgorithmType::SmCmGsc;
        sm.bound.kind = BoundKind::Pidb;
        AlgorithmConfig mvdr;
        mvdr.name = "mvdr";
        mvdr.type = AlgorithmType::Mvdr;
        c.algorithms = {sm, mvdr};
        out.result = run_experiment(c);
        return out;
    }();
    return runs;
}

Outcome ac6_oracle_equivalence() {
    const ConvergedRuns& cr = converged_runs();
    double gap_fp = 0.0;
    double gap_sm = 0.0;
    for (const RunRecord& run : cr.result.runs) {
        const Scenario& s = run.scenario;
        const CVector a0 = s.desired_steering();
        Rng rng = make_stream(cr.cfg.run.master_seed, run.run, StreamPurpose::Analysis);
        std::vector<CVector> blk;
        const SnapshotSource src(s);
        for (std::size_t i = 0; i < 2000; ++i) blk.push_back(src.next(i, rng).received);
        GscState st = GscState::with_unit_start(1.0, a0, blocking_css(a0));
        st.w = cm_gsc_fixed_point(blk, st).w;
        const double mvdr = run.algorithms[1].final_sinr_db;
        gap_fp += sinr_of(effective_weights(st), s, 0) - mvdr;
        gap_sm += run.algorithms[0].final_sinr_db - mvdr;
    }
    const double n = double(cr.result.run_count());
    gap_fp /= n;
    gap_sm /= n;
    return {gap_fp >= -1.0 && gap_sm >= -1.0,
            "mean SINR vs MVDR over " + std::to_string(cr.result.run_count()) + " scenarios: fixed point " +
                fmt("%+.2f dB", gap_fp) + ", SM-CM-GSC " + fmt("%+.2f dB", gap_sm)};
}

Outcome ac7_appendix_a() {
    Rng rng = make_stream(107, 0, StreamPurpose::Analysis);
    double low = 1e300;
    for (double v : {std::sqrt(0.5), 1.0}) {
        Scenario s = random_scenario(4, 15.0, rng);
        s.noise_power = 0.0;
        low = std::min(low, convexity_probe(s, v, 100, 2.0, rng));
    }
    double worst = 0.0;
    std::normal_distribution<double> g(0.0, 0.5);
    for (int t = 0; t < 20; ++t) {
        const Scenario s = random_scenario(2 + t % 4, 5.0 + double(t % 3) * 5.0, rng);
        CVector w(16);
        for (auto& x : w) x = Complex(g(rng), g(rng));
        const CMatrix M = cm_hessian(w, s, 1.0);
        const CMatrix F = oracles::finite_difference_hessian(
            [&](const CVector& x) { return oracles::cm_cost_model(x, s, 1.0); }, w);
        worst = std::max(worst, (M - F).norm() / F.norm());
    }
    return {low >= -1e-8 && worst <= 1e-4,
            "min eigenvalue " + fmt("%.3e", low) + ", worst Hessian rel dev " + fmt("%.2e", worst)};
}

Outcome ac8_appendix_b() {
    Rng rng = make_stream(108, 0, StreamPurpose::Analysis);
    double worst = 0.0;
    double cross = 0.0;
    for (int t = 0; t < 100; ++t) {
        const CVector s = oracles::phase_balanced_gains(2 + t % 10, rng);
        cross = std::max(cross, std::abs(oracles::dropped_cross_term(s)));
        const double a = fourth_moment_paper(s);
        worst = std::max(worst, std::abs(a - fourth_moment_bruteforce(s)) / a);
    }
    CVector co(2);
    co << 1.0, 1.0;
    const double p = fourth_moment_paper(co);
    const double b = fourth_moment_bruteforce(co);
    return {worst <= 1e-12 && p == 6.0 && b == 8.0,
            "worst rel err " + fmt("%.2e", worst) + ", max |cross term| " + fmt("%.2e", cross) + ", [1,1] gives " +
                fmt("%g", p) + " vs " + fmt("%g", b)};
}

Outcome ac9_stability() {
    const ConvergedRuns& cr = converged_runs();
    std::size_t converged = 0;
    std::size_t below = 0;
    double worst_ratio = 0.0;
    for (const RunRecord& run : cr.result.runs) {
        const AlgorithmRunRecord& sm = run.algorithms[0];
        if (sm.final_sinr_db < run.algorithms[1].final_sinr_db - 1.0 || sm.steady_updates == 0) continue;
        ++converged;
        const Scenario& s = run.scenario;
        const CVector a0 = s.desired_steering();
        Rng rng = make_stream(cr.cfg.run.master_seed, run.run, StreamPurpose::Analysis);
        std::vector<CVector> calib;
        const SnapshotSource src(s);
        for (std::size_t i = 0; i < 2000; ++i) calib.push_back(src.next(kSteadyStateIndex, rng).received);
        const CVector w_opt = scaled_wiener(ideal_covariance(s, kSteadyStateIndex), a0, calib, s.desired().power);
        const double bound = stability_bound(estimate_rdr(s, w_opt, blocking_css(a0), 100000, rng));
        const double ratio = sm.steady_mean_mu / bound;
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio < 1.0) ++below;
    }
    return {converged > 0 && below == converged,
            std::to_string(below) + "/" + std::to_string(converged) + " converged runs below the bound, worst mu/bound " +
                fmt("%.3g", worst_ratio)};
}

Outcome ac10_determinism() {
    ExperimentConfig cfg = preset("fig2_q6");
    cfg.run.runs = 70;
    cfg.run.threads = 1;
    const auto dir = std::filesystem::temp_directory_path();
    const std::string one = (dir / "smcm_accept_1.csv").string();
    const std::string many = (dir / "smcm_accept_n.csv").string();
    write_csv(run_experiment(cfg).series, one);
    cfg.run.threads = 4;
    write_csv(run_experiment(cfg).series, many);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(one);
    const std::string b = slurp(many);
    std::filesystem::remove(one);
    std::filesystem::remove(many);
    return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, 1 vs 4 threads " + (a == b ? "identical" : "differ")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"AC1 projection exactness", ac1_projection},
        {"AC2 update rates", ac2_update_rates},
        {"AC3 convergence ordering", ac3_ordering},
        {"AC4 nonstationary tracking", ac4_tracking},
        {"AC5 steady-state MSE prediction", ac5_prediction},
        {"AC6 oracle equivalence", ac6_oracle_equivalence},
        {"AC7 Hessian and convexity", ac7_appendix_a},
        {"AC8 fourth-moment identity", ac8_appendix_b},
        {"AC9 step-size stability", ac9_stability},
        {"AC10 determinism", ac10_determinism},
    };
    int failures = 0;
    for (const auto& [name, body] : criteria) {
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.passed) ++failures;
        std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
