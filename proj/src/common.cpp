#include "smcm/common.hpp"

namespace smcm {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InfeasibleScenario: return "infeasible-scenario";
        case ErrorKind::InvalidSteering: return "invalid-steering";
        case ErrorKind::InvalidState: return "invalid-state";
        case ErrorKind::DegenerateSnapshot: return "degenerate-snapshot";
        case ErrorKind::UndefinedProjection: return "undefined-projection";
        case ErrorKind::NonInvertibleCovariance: return "non-invertible-covariance";
        case ErrorKind::PredictionOutOfDomain: return "prediction-out-of-domain";
        case ErrorKind::DegenerateNoise: return "degenerate-noise";
        case ErrorKind::UndefinedMoment: return "undefined-moment";
        case ErrorKind::UndefinedBound: return "undefined-bound";
        case ErrorKind::EnumerationLimit: return "enumeration-limit";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

Rng make_stream(std::uint64_t master_seed, std::uint64_t run_index, StreamPurpose purpose) {
    const auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
    const auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
    const auto p = static_cast<std::uint64_t>(purpose);
    std::seed_seq seq{lo(master_seed), hi(master_seed), lo(run_index), hi(run_index), lo(p), 0x5eedu};
    return Rng(seq);
}

}  // namespace smcm
