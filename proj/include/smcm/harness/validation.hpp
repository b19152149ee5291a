#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace smcm::harness {

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Quick invariant checks over random scenarios: projection exactness,
/// constraint preservation, curvature, fourth-moment identity, metric and
/// determinism properties of the harness.
std::vector<PropertyResult> run_validation_suite(std::uint64_t seed = 1);

}  // namespace smcm::harness
