#include "smcm/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <thread>

#include "smcm/analysis.hpp"
#include "smcm/baselines.hpp"
#include "smcm/sm_adaptive.hpp"

namespace smcm::harness {

namespace {

/// SINR from the projections s = A^H w~ onto every source steering vector.
double sinr_from_projections(const CVector& s, double w_norm2, const Scenario& scenario, std::size_t index) {
    const auto& src = scenario.sources;
    double interference = scenario.noise_power * w_norm2;
    for (std::size_t k = 1; k < src.size(); ++k) {
        if (src[k].active_at(index)) interference += src[k].power * std::norm(s[static_cast<Eigen::Index>(k)]);
    }
    const double signal = src.front().power * std::norm(s[0]);
    return linear_to_db(signal / interference);
}

std::uint64_t fnv_fold(std::uint64_t h, const CVector& r) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(r.data());
    const std::size_t n = static_cast<std::size_t>(r.size()) * sizeof(Complex);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t blocking_cost(const BlockingMatrix& B) {
    // The CSS product B r = r - a0 (a0^H r) costs m; a general B costs rows * m.
    const auto m = static_cast<std::uint64_t>(B.cols());
    return B.kind == BlockingKind::Css ? m : static_cast<std::uint64_t>(B.rows()) * m;
}

class SmGscBeamformer final : public Beamformer {
public:
    SmGscBeamformer(const AlgorithmConfig& c, const Scenario& s)
        : filter_(GscState::with_unit_start(c.v, s.desired_steering(),
                                            make_blocking(c.blocking, s.desired_steering())),
                  c.bound, s.noise_power) {}
    CVector weights() const override { return filter_.weights(); }

protected:
    StepRecord step(const CVector& r, std::size_t) override {
        const SmUpdateRecord rec = filter_.step(r);
        const auto& B = filter_.state().blocking;
        StepRecord out{rec.y_prior, rec.updated, rec.mu, 0};
        out.mults = static_cast<std::uint64_t>(r.size()) + blocking_cost(B);
        if (rec.updated) out.mults += static_cast<std::uint64_t>(B.rows());
        return out;
    }

private:
    SmCmGsc filter_;
};

class SmDfpBeamformer final : public Beamformer {
public:
    SmDfpBeamformer(const AlgorithmConfig& c, const Scenario& s)
        : filter_(c.v, s.desired_steering(), c.bound, s.noise_power) {}
    CVector weights() const override { return filter_.weights(); }

protected:
    StepRecord step(const CVector& r, std::size_t) override {
        const SmUpdateRecord rec = filter_.step(r);
        const auto m = static_cast<std::uint64_t>(r.size());
        StepRecord out{rec.y_prior, rec.updated, rec.mu, 2 * m};
        if (rec.updated) out.mults += m;
        return out;
    }

private:
    SmCmDfp filter_;
};

class SgGscBeamformer final : public Beamformer {
public:
    SgGscBeamformer(const AlgorithmConfig& c, const Scenario& s, bool cm)
        : state_(GscState::with_unit_start(c.v, s.desired_steering(),
                                           make_blocking(c.blocking, s.desired_steering()))),
          mu_(c.step_size),
          cm_(cm) {}
    CVector weights() const override { return effective_weights(state_); }

protected:
    StepRecord step(const CVector& r, std::size_t) override {
        const Complex y = cm_ ? cm_gsc_sg_update(state_, r, mu_) : mv_gsc_sg_update(state_, r, mu_);
        const std::uint64_t mults = static_cast<std::uint64_t>(r.size()) + blocking_cost(state_.blocking) +
                                    static_cast<std::uint64_t>(state_.blocking.rows());
        return {y, true, mu_, mults};
    }

private:
    GscState state_;
    double mu_;
    bool cm_;
};

class MvdrBeamformer final : public Beamformer {
public:
    explicit MvdrBeamformer(const Scenario& s) : scenario_(s), a0_(s.desired_steering()) { refresh(0); }
    CVector weights() const override { return w_; }

protected:
    StepRecord step(const CVector& r, std::size_t index) override {
        refresh(index);
        return {w_.dot(r), false, 0.0, static_cast<std::uint64_t>(r.size())};
    }

private:
    void refresh(std::size_t index) {
        std::size_t active = 0;
        for (const auto& src : scenario_.sources) active += src.active_at(index) ? 1 : 0;
        if (active == active_) return;
        active_ = active;
        w_ = mvdr_weights(interference_noise_covariance(scenario_, index), a0_);
    }

    const Scenario& scenario_;
    CVector a0_;
    CVector w_;
    std::size_t active_ = std::numeric_limits<std::size_t>::max();
};

struct RunTrace {
    RunRecord record;
    std::vector<std::vector<double>> sinr;           // [alg][snapshot]
    std::vector<std::vector<double>> mse;            // [alg][snapshot]
    std::vector<std::vector<unsigned char>> updated; // [alg][snapshot]
    std::vector<std::uint64_t> mults;                // [alg]
};

std::size_t steady_start(std::size_t snapshots, double fraction) {
    const auto len = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(snapshots)));
    return snapshots - std::min(std::max<std::size_t>(len, 1), snapshots);
}

RunTrace simulate_run(const ExperimentConfig& config, const ScenarioDescription& desc, std::size_t run) {
    RunTrace t;
    t.record.run = run;
    Rng scenario_rng = make_stream(config.run.master_seed, run, StreamPurpose::Scenario);
    t.record.scenario = build_scenario(desc, scenario_rng);
    const Scenario& scenario = t.record.scenario;

    const std::size_t n = config.scenario.snapshots;
    const std::size_t algs = config.algorithms.size();
    const std::size_t steady = steady_start(n, config.analysis.steady_fraction);

    std::vector<std::unique_ptr<Beamformer>> bfs;
    for (const auto& a : config.algorithms) bfs.push_back(make_beamformer(a, scenario));
    t.sinr.assign(algs, std::vector<double>(n));
    t.mse.assign(algs, std::vector<double>(n));
    t.updated.assign(algs, std::vector<unsigned char>(n));
    t.mults.assign(algs, 0);
    t.record.algorithms.resize(algs);
    std::vector<double> steady_mu(algs, 0.0);

    const SnapshotSource source(scenario);
    const CMatrix& A = source.steering();
    Rng rng = make_stream(config.run.master_seed, run, StreamPurpose::Snapshots);
    for (std::size_t i = 0; i < n; ++i) {
        const Snapshot snap = source.next(i, rng);
        for (std::size_t k = 0; k < algs; ++k) {
            const CVector w = bfs[k]->weights();
            const CVector s = A.adjoint() * w;
            t.sinr[k][i] = sinr_from_projections(s, w.squaredNorm(), scenario, i);
            const StepRecord rec = bfs[k]->consume(snap.received, i);
            t.mse[k][i] = std::norm(snap.desired_symbol - rec.y);
            t.updated[k][i] = rec.updated ? 1 : 0;
            t.mults[k] += rec.mults;
            auto& ar = t.record.algorithms[k];
            if (rec.updated) {
                ++ar.updates;
                if (i >= steady) {
                    ++ar.steady_updates;
                    steady_mu[k] += rec.mu;
                }
            }
        }
    }
    for (std::size_t k = 0; k < algs; ++k) {
        auto& ar = t.record.algorithms[k];
        ar.stream_checksum = bfs[k]->stream_checksum();
        ar.steady_mean_mu = ar.steady_updates ? steady_mu[k] / static_cast<double>(ar.steady_updates) : 0.0;
        ar.final_weights = bfs[k]->weights();
        ar.final_sinr_db = sinr_of(ar.final_weights, scenario, n - 1);
    }
    return t;
}

std::size_t worker_count(std::size_t requested) {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

constexpr std::size_t kBatchRuns = 32;

}  // namespace

StepRecord Beamformer::consume(const CVector& r, std::size_t index) {
    checksum_ = fnv_fold(checksum_, r);
    return step(r, index);
}

double sinr_of(const CVector& w_tilde, const Scenario& scenario, std::size_t index) {
    if (!scenario.desired().active_at(index)) {
        throw Error(ErrorKind::InvalidState, "desired source is not active at this snapshot");
    }
    const CVector s = scenario.steering_matrix().adjoint() * w_tilde;
    return sinr_from_projections(s, w_tilde.squaredNorm(), scenario, index);
}

std::unique_ptr<Beamformer> make_beamformer(const AlgorithmConfig& config, const Scenario& scenario) {
    switch (config.type) {
        case AlgorithmType::SmCmGsc: return std::make_unique<SmGscBeamformer>(config, scenario);
        case AlgorithmType::SmCmDfp: return std::make_unique<SmDfpBeamformer>(config, scenario);
        case AlgorithmType::CmGsc: return std::make_unique<SgGscBeamformer>(config, scenario, true);
        case AlgorithmType::MvGsc: return std::make_unique<SgGscBeamformer>(config, scenario, false);
        case AlgorithmType::Mvdr: return std::make_unique<MvdrBeamformer>(scenario);
    }
    throw Error(ErrorKind::Config, "unhandled algorithm type");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const ScenarioDescription desc = config.scenario_description();
    const std::size_t n = config.scenario.snapshots;
    const std::size_t algs = config.algorithms.size();
    const std::size_t runs = config.run.runs;

    ExperimentResult result;
    result.snapshots = n;
    result.series.resize(algs);
    std::vector<std::vector<double>> sinr_sum(algs, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> mse_sum(algs, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < algs; ++k) {
        result.series[k].algorithm = config.algorithms[k].name;
        result.series[k].updates.assign(n, 0);
    }

    const std::size_t workers = worker_count(config.run.threads);
    for (std::size_t first = 0; first < runs; first += kBatchRuns) {
        const std::size_t count = std::min(kBatchRuns, runs - first);
        std::vector<RunTrace> traces(count);
        std::vector<std::exception_ptr> errors(count);
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t j = next++; j < count; j = next++) {
                try {
                    traces[j] = simulate_run(config, desc, first + j);
                } catch (...) {
                    errors[j] = std::current_exception();
                }
            }
        };
        const std::size_t pool = std::min(workers, count);
        if (pool <= 1) {
            work();
        } else {
            std::vector<std::thread> threads;
            for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(work);
            for (auto& th : threads) th.join();
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
        // Reduce in run-index order so the sums never depend on scheduling.
        for (auto& tr : traces) {
            for (std::size_t k = 0; k < algs; ++k) {
                auto& ser = result.series[k];
                for (std::size_t i = 0; i < n; ++i) {
                    sinr_sum[k][i] += tr.sinr[k][i];
                    mse_sum[k][i] += tr.mse[k][i];
                    ser.updates[i] += tr.updated[k][i];
                }
                ser.total_mults += tr.mults[k];
            }
            result.runs.push_back(std::move(tr.record));
        }
    }

    const double r = static_cast<double>(runs);
    for (std::size_t k = 0; k < algs; ++k) {
        auto& ser = result.series[k];
        ser.mean_sinr_db.resize(n);
        ser.mean_mse.resize(n);
        ser.update_rate.resize(n);
        std::uint64_t cumulative = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ser.mean_sinr_db[i] = sinr_sum[k][i] / r;
            ser.mean_mse[i] = mse_sum[k][i] / r;
            cumulative += ser.updates[i];
            ser.update_rate[i] = static_cast<double>(cumulative) / (r * static_cast<double>(i + 1));
        }
    }
    return result;
}

double window_update_rate(const MetricSeries& series, std::size_t first, std::size_t last, std::size_t runs) {
    if (last <= first || runs == 0) return 0.0;
    std::uint64_t total = 0;
    for (std::size_t i = first; i < last; ++i) total += series.updates[i];
    return static_cast<double>(total) / (static_cast<double>(runs) * static_cast<double>(last - first));
}

double window_mean_mse(const MetricSeries& series, std::size_t first, std::size_t last) {
    if (last <= first) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (std::size_t i = first; i < last; ++i) acc += series.mean_mse[i];
    return acc / static_cast<double>(last - first);
}

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

}  // namespace

std::string format_csv(const std::vector<MetricSeries>& series) {
    std::string out = "snapshot,algorithm,mean_sinr_db,mean_mse,update_rate\n";
    std::size_t n = 0;
    for (const auto& s : series) n = std::max(n, s.mean_sinr_db.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& s : series) {
            if (i >= s.mean_sinr_db.size()) continue;
            out += std::to_string(i + 1) + "," + s.algorithm + "," + fmt(s.mean_sinr_db[i]) + "," + fmt(s.mean_mse[i]) +
                   "," + fmt(s.update_rate[i]) + "\n";
        }
    }
    return out;
}

void write_csv(const std::vector<MetricSeries>& series, const std::string& path) {
    write_text(format_csv(series), path);
}

std::vector<AnalysisRow> run_analysis(const ExperimentConfig& config) {
    std::vector<double> snrs = config.scenario.snr_sweep_db;
    if (snrs.empty()) snrs.push_back(config.scenario.snr_db);

    ExperimentConfig base = config;
    base.algorithms.clear();
    for (const auto& a : config.algorithms) {
        if (a.type == AlgorithmType::SmCmGsc) base.algorithms.push_back(a);
    }
    if (base.algorithms.empty()) {
        throw Error(ErrorKind::Config, "algorithms: analysis needs at least one sm_cm_gsc entry");
    }

    std::vector<AnalysisRow> rows;
    for (double snr : snrs) {
        ExperimentConfig cfg = base;
        cfg.scenario.snr_db = snr;
        const ExperimentResult sim = run_experiment(cfg);
        const std::size_t n = sim.snapshots;
        const std::size_t first = steady_start(n, cfg.analysis.steady_fraction);
        const std::size_t pred_runs = std::min(cfg.analysis.prediction_runs, sim.run_count());

        for (std::size_t k = 0; k < cfg.algorithms.size(); ++k) {
            const auto& alg = cfg.algorithms[k];
            AnalysisRow row;
            row.scheme = alg.name;
            row.snr_db = snr;
            row.q = cfg.source_count();
            row.xi_total_sim = window_mean_mse(sim.series[k], first, n);
            row.update_rate_sim = window_update_rate(sim.series[k], first, n, sim.run_count());

            SteadyStateOptions opt;
            opt.scheme = alg.bound;
            opt.form = cfg.analysis.form;
            opt.blocking = alg.blocking;
            opt.v = alg.v;
            opt.br_samples = cfg.analysis.br_samples;
            opt.calibration_snapshots = cfg.analysis.calibration_snapshots;

            double xi_min = 0.0, xi_ex = 0.0, xi_total = 0.0, p_update = 0.0;
            std::size_t in_domain = 0;
            for (std::size_t r = 0; r < pred_runs; ++r) {
                Rng rng = make_stream(cfg.run.master_seed, r, StreamPurpose::Analysis);
                const SteadyStatePrediction p = predict_steady_state(sim.runs[r].scenario, opt, rng);
                xi_min += p.inputs.xi_min;
                p_update += p.prediction.p_update;
                if (p.in_domain) {
                    ++in_domain;
                    xi_ex += p.prediction.xi_ex;
                    xi_total += p.prediction.xi_total;
                }
            }
            const double pr = static_cast<double>(pred_runs);
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.xi_min = xi_min / pr;
            row.p_update_pred = p_update / pr;
            row.xi_ex_pred = in_domain ? xi_ex / static_cast<double>(in_domain) : nan;
            row.xi_total_pred = in_domain ? xi_total / static_cast<double>(in_domain) : nan;
            row.in_domain_fraction = static_cast<double>(in_domain) / pr;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_analysis_csv(const std::vector<AnalysisRow>& rows, const std::string& path) {
    std::string out = "scheme,snr_db,q,xi_min,xi_ex_pred,xi_total_pred,xi_total_sim,p_update_pred,update_rate_sim\n";
    for (const auto& r : rows) {
        out += r.scheme + "," + fmt(r.snr_db) + "," + std::to_string(r.q) + "," + fmt(r.xi_min) + "," +
               fmt(r.xi_ex_pred) + "," + fmt(r.xi_total_pred) + "," + fmt(r.xi_total_sim) + "," +
               fmt(r.p_update_pred) + "," + fmt(r.update_rate_sim) + "\n";
    }
    write_text(out, path);
}

}  // namespace smcm::harness
