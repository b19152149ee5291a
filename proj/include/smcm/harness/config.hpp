#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "smcm/analysis.hpp"
#include "smcm/array_model.hpp"
#include "smcm/gsc_core.hpp"
#include "smcm/sm_adaptive.hpp"

namespace smcm::harness {

enum class AlgorithmType { SmCmGsc, SmCmDfp, CmGsc, MvGsc, Mvdr };

std::string_view to_string(AlgorithmType type);
AlgorithmType algorithm_type_from_string(std::string_view name);

struct AlgorithmConfig {
    std::string name;  // unique label, used as the CSV algorithm column
    AlgorithmType type = AlgorithmType::SmCmGsc;
    BoundScheme bound;
    double step_size = 0.005;
    BlockingKind blocking = BlockingKind::Css;
    double v = 1.0;

    bool data_selective() const { return type == AlgorithmType::SmCmGsc || type == AlgorithmType::SmCmDfp; }
    bool operator==(const AlgorithmConfig&) const = default;
};

struct SourceGroup {
    std::size_t onset = 0;
    std::size_t count = 0;
    std::vector<double> powers_db;  // empty: all 0 dB

    bool operator==(const SourceGroup&) const = default;
};

struct SourceEntry {
    std::optional<double> doa_deg;  // missing: drawn uniformly per run
    double power_db = 0.0;
    std::size_t onset = 0;

    bool operator==(const SourceEntry&) const = default;
};

struct ScenarioConfig {
    double snr_db = 15.0;
    // Either an explicit source list (first entry desired) or a random count.
    std::vector<SourceEntry> sources;
    std::optional<std::size_t> random_source_count;
    std::vector<double> random_source_powers_db;
    double min_separation_deg = 2.0;
    std::size_t snapshots = 1000;
    std::vector<SourceGroup> nonstationary;
    std::vector<double> snr_sweep_db;  // used by `analyze`; empty means {snr_db}

    bool operator==(const ScenarioConfig&) const = default;
};

struct RunConfig {
    std::size_t runs = 1000;
    std::uint64_t master_seed = 1;
    std::size_t threads = 0;  // 0: hardware concurrency

    bool operator==(const RunConfig&) const = default;
};

struct OutputConfig {
    std::string csv_path;
    std::string analysis_path;

    bool operator==(const OutputConfig&) const = default;
};

struct AnalysisConfig {
    MseForm form = MseForm::Simplified;
    std::size_t br_samples = 100000;
    std::size_t calibration_snapshots = 2000;
    std::size_t prediction_runs = 20;
    double steady_fraction = 0.2;

    bool operator==(const AnalysisConfig&) const = default;
};

struct ExperimentConfig {
    ArrayGeometry array;
    ScenarioConfig scenario;
    RunConfig run;
    std::vector<AlgorithmConfig> algorithms;
    OutputConfig outputs;
    AnalysisConfig analysis;

    /// Source requests for build_scenario: the base set followed by every
    /// nonstationary group.
    ScenarioDescription scenario_description() const;
    std::size_t source_count() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates a JSON config; errors name the offending field path.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace smcm::harness
