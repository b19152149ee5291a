#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace smcm {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// One random stream per Monte Carlo run; never shared between threads.
using Rng = std::mt19937_64;

enum class ErrorKind {
    InfeasibleScenario,
    InvalidSteering,
    InvalidState,
    DegenerateSnapshot,
    UndefinedProjection,
    NonInvertibleCovariance,
    PredictionOutOfDomain,
    DegenerateNoise,
    UndefinedMoment,
    UndefinedBound,
    EnumerationLimit,
    Config,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

constexpr double kPi = std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Stream index within a run. Each purpose gets its own stream so that,
/// e.g., the analysis Monte Carlo never perturbs the snapshot sequence.
enum class StreamPurpose : std::uint64_t { Scenario = 0, Snapshots = 1, Analysis = 2 };

/// Deterministic stream derived from (master seed, run index, purpose).
Rng make_stream(std::uint64_t master_seed, std::uint64_t run_index,
                StreamPurpose purpose = StreamPurpose::Snapshots);

}  // namespace smcm
