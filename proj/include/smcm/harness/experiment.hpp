#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "smcm/array_model.hpp"
#include "smcm/harness/config.hpp"

namespace smcm::harness {

/// Output SINR in dB of beamformer w~ at snapshot `index`, against the ideal
/// interference-plus-noise covariance of the sources active there.
double sinr_of(const CVector& w_tilde, const Scenario& scenario, std::size_t index);

/// Result of feeding one snapshot to a beamformer.
struct StepRecord {
    Complex y{};               // a-priori output
    bool updated = false;
    double mu = 0.0;           // step size applied (0 when no update)
    std::uint64_t mults = 0;   // complex multiplications spent on this snapshot
};

/// Common face of every algorithm the harness can run.
class Beamformer {
public:
    virtual ~Beamformer() = default;
    /// Current full weight vector w~ (the one used for the next output).
    virtual CVector weights() const = 0;
    /// Processes snapshot `index` and folds it into the stream checksum.
    StepRecord consume(const CVector& r, std::size_t index);
    std::uint64_t stream_checksum() const { return checksum_; }

protected:
    virtual StepRecord step(const CVector& r, std::size_t index) = 0;

private:
    std::uint64_t checksum_ = 14695981039346656037ull;
};

/// Instantiates `config` for `scenario`. Adaptive GSC variants start from
/// w = [1, 0, ..., 0]; the direct form starts from v a0; MVDR uses the ideal
/// interference-plus-noise covariance of the active sources.
std::unique_ptr<Beamformer> make_beamformer(const AlgorithmConfig& config, const Scenario& scenario);

struct MetricSeries {
    std::string algorithm;
    std::vector<double> mean_sinr_db;   // per snapshot, averaged over runs
    std::vector<double> mean_mse;       // |b0 - y|^2, averaged over runs
    std::vector<double> update_rate;    // cumulative eta up to and including the snapshot
    std::vector<std::uint64_t> updates; // update events at each snapshot, summed over runs
    std::uint64_t total_mults = 0;      // summed over runs and snapshots
};

struct AlgorithmRunRecord {
    std::uint64_t updates = 0;
    std::uint64_t stream_checksum = 0;  // hash of every snapshot the algorithm consumed
    double steady_mean_mu = 0.0;        // mean step over updating snapshots in the steady window
    std::uint64_t steady_updates = 0;
    double final_sinr_db = 0.0;
    CVector final_weights;
};

struct RunRecord {
    std::size_t run = 0;
    Scenario scenario;
    std::vector<AlgorithmRunRecord> algorithms;  // config order
};

struct ExperimentResult {
    std::vector<MetricSeries> series;  // config order
    std::vector<RunRecord> runs;       // run-index order
    std::size_t snapshots = 0;

    std::size_t run_count() const { return runs.size(); }
};

/// Runs every configured algorithm on identical snapshot streams, one fresh
/// scenario per run, and averages the metrics in run-index order. The result
/// does not depend on the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Fraction of updating snapshots in [first, last) of a series.
double window_update_rate(const MetricSeries& series, std::size_t first, std::size_t last, std::size_t runs);

/// Mean of mean_mse over [first, last).
double window_mean_mse(const MetricSeries& series, std::size_t first, std::size_t last);

/// CSV with columns snapshot, algorithm, mean_sinr_db, mean_mse, update_rate.
/// Snapshots are numbered from 1.
void write_csv(const std::vector<MetricSeries>& series, const std::string& path);
std::string format_csv(const std::vector<MetricSeries>& series);

/// One row of the analysis table.
struct AnalysisRow {
    std::string scheme;
    double snr_db = 0.0;
    std::size_t q = 0;
    double xi_min = 0.0;
    double xi_ex_pred = 0.0;
    double xi_total_pred = 0.0;
    double xi_total_sim = 0.0;
    double p_update_pred = 0.0;
    double update_rate_sim = 0.0;
    double in_domain_fraction = 0.0;
};

/// Steady-state prediction next to the matched simulation, for every
/// data-selective GSC algorithm and every SNR of the sweep.
std::vector<AnalysisRow> run_analysis(const ExperimentConfig& config);

void write_analysis_csv(const std::vector<AnalysisRow>& rows, const std::string& path);

}  // namespace smcm::harness
