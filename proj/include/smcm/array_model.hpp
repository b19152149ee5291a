#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "smcm/common.hpp"

namespace smcm {

struct ArrayGeometry {
    std::size_t elements = 16;
    double spacing_ratio = 0.5;  // inter-element distance over wavelength

    void validate() const;
    bool operator==(const ArrayGeometry&) const = default;
};

struct SourceSpec {
    double doa = 0.0;       // radians, (0, pi)
    double power = 1.0;     // linear
    std::size_t onset = 0;  // first active snapshot
    bool is_desired = false;

    bool active_at(std::size_t index) const { return index >= onset; }
};

/// Source request before DOA randomization. A missing DOA is drawn uniformly on (0, pi).
struct SourceRequest {
    std::optional<double> doa;
    double power_db = 0.0;  // relative to the desired user
    std::size_t onset = 0;

    bool operator==(const SourceRequest&) const = default;
};

struct ScenarioDescription {
    ArrayGeometry geometry;
    double snr_db = 15.0;
    std::vector<SourceRequest> sources;  // first entry is the desired user
    double min_separation = deg_to_rad(2.0);
};

struct Scenario {
    ArrayGeometry geometry;
    std::vector<SourceSpec> sources;  // desired user first
    double noise_power = 0.0;
    double min_separation = deg_to_rad(2.0);

    const SourceSpec& desired() const { return sources.front(); }
    std::size_t source_count() const { return sources.size(); }
    CVector desired_steering() const;
    /// Steering vectors of all sources, desired first, as columns.
    CMatrix steering_matrix() const;
};

struct Snapshot {
    CVector received;
    double desired_symbol = 1.0;
    std::size_t index = 0;
};

inline constexpr int kDoaResampleBudget = 10000;

/// Normalized ULA response: element p is exp(-2 pi j p d cos(theta)) / sqrt(m).
CVector steering_vector(double theta, std::size_t m, double spacing_ratio);

/// Resolves random DOAs and converts powers to linear scale. Noise power is
/// set so the desired user's SNR equals `raw.snr_db`.
Scenario build_scenario(const ScenarioDescription& raw, Rng& rng);

/// Snapshot generator with the scenario's steering vectors cached. The
/// scenario must outlive the source.
class SnapshotSource {
public:
    explicit SnapshotSource(const Scenario& scenario);

    Snapshot next(std::size_t index, Rng& rng) const;
    const CMatrix& steering() const { return steering_; }

private:
    const Scenario* scenario_;
    CMatrix steering_;
    std::vector<double> amplitudes_;
};

/// One received vector r = sum_k sqrt(p_k) a_k b_k + n over sources active at `index`.
Snapshot emit_snapshot(const Scenario& scenario, std::size_t index, Rng& rng);

/// Exact E[r r^H] at `index`.
CMatrix ideal_covariance(const Scenario& scenario, std::size_t index);

/// Interference-plus-noise covariance at `index` (desired user excluded).
CMatrix interference_noise_covariance(const Scenario& scenario, std::size_t index);

}  // namespace smcm
