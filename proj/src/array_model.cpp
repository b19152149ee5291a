#include "smcm/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smcm {

void ArrayGeometry::validate() const {
    if (elements < 2) throw Error(ErrorKind::Config, "array.elements must be >= 2");
    if (!(spacing_ratio > 0.0)) throw Error(ErrorKind::Config, "array.spacing_ratio must be > 0");
}

CVector steering_vector(double theta, std::size_t m, double spacing_ratio) {
    CVector a(static_cast<Eigen::Index>(m));
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    const double phase_step = -2.0 * kPi * spacing_ratio * std::cos(theta);
    for (std::size_t p = 0; p < m; ++p) {
        a[static_cast<Eigen::Index>(p)] = std::polar(scale, phase_step * static_cast<double>(p));
    }
    return a;
}

CVector Scenario::desired_steering() const {
    return steering_vector(desired().doa, geometry.elements, geometry.spacing_ratio);
}

CMatrix Scenario::steering_matrix() const {
    const auto m = static_cast<Eigen::Index>(geometry.elements);
    CMatrix A(m, static_cast<Eigen::Index>(sources.size()));
    for (std::size_t k = 0; k < sources.size(); ++k) {
        A.col(static_cast<Eigen::Index>(k)) =
            steering_vector(sources[k].doa, geometry.elements, geometry.spacing_ratio);
    }
    return A;
}

namespace {

bool separated(const std::vector<double>& doas, double min_separation) {
    for (std::size_t i = 0; i < doas.size(); ++i) {
        for (std::size_t j = i + 1; j < doas.size(); ++j) {
            if (std::abs(doas[i] - doas[j]) < min_separation) return false;
        }
    }
    return true;
}

}  // namespace

Scenario build_scenario(const ScenarioDescription& raw, Rng& rng) {
    raw.geometry.validate();
    const std::size_t q = raw.sources.size();
    if (q == 0) throw Error(ErrorKind::Config, "scenario needs at least the desired source");
    if (q > raw.geometry.elements) {
        std::ostringstream os;
        os << "requested " << q << " sources for " << raw.geometry.elements << " elements";
        throw Error(ErrorKind::InfeasibleScenario, os.str());
    }
    if (raw.sources.front().onset != 0) {
        throw Error(ErrorKind::Config, "desired source must be active from snapshot 0");
    }
    if (raw.min_separation < 0.0) throw Error(ErrorKind::Config, "min_separation must be >= 0");

    std::vector<double> doas(q);
    std::vector<std::size_t> random_slots;
    for (std::size_t k = 0; k < q; ++k) {
        if (raw.sources[k].doa) {
            const double d = *raw.sources[k].doa;
            if (!(d > 0.0 && d < kPi)) throw Error(ErrorKind::Config, "source DOA must lie in (0, pi)");
            doas[k] = d;
        } else {
            random_slots.push_back(k);
        }
    }

    std::uniform_real_distribution<double> uniform_doa(0.0, kPi);
    bool ok = separated(doas, raw.min_separation) && random_slots.empty();
    for (int attempt = 0; !ok && attempt < kDoaResampleBudget; ++attempt) {
        if (random_slots.empty()) break;
        for (std::size_t k : random_slots) {
            double d = 0.0;
            do { d = uniform_doa(rng); } while (d <= 0.0);
            doas[k] = d;
        }
        ok = separated(doas, raw.min_separation);
    }
    if (!ok) {
        throw Error(ErrorKind::InfeasibleScenario,
                    "no DOA layout satisfies the minimum separation within the resample budget");
    }

    Scenario s;
    s.geometry = raw.geometry;
    s.min_separation = raw.min_separation;
    s.sources.reserve(q);
    for (std::size_t k = 0; k < q; ++k) {
        SourceSpec src;
        src.doa = doas[k];
        src.power = db_to_linear(raw.sources[k].power_db);
        src.onset = raw.sources[k].onset;
        src.is_desired = (k == 0);
        s.sources.push_back(src);
    }
    s.noise_power = s.desired().power / db_to_linear(raw.snr_db);
    return s;
}

SnapshotSource::SnapshotSource(const Scenario& scenario)
    : scenario_(&scenario), steering_(scenario.steering_matrix()) {
    amplitudes_.reserve(scenario.sources.size());
    for (const auto& src : scenario.sources) amplitudes_.push_back(std::sqrt(src.power));
}

Snapshot SnapshotSource::next(std::size_t index, Rng& rng) const {
    const auto& sc = *scenario_;
    const auto m = steering_.rows();
    Snapshot snap;
    snap.index = index;
    snap.received = CVector::Zero(m);
    for (std::size_t k = 0; k < sc.sources.size(); ++k) {
        // Every source draws its symbol each snapshot so the stream layout
        // does not depend on which sources are active.
        const double b = (rng() & 1u) ? 1.0 : -1.0;
        if (k == 0) snap.desired_symbol = b;
        if (!sc.sources[k].active_at(index)) continue;
        snap.received += (amplitudes_[k] * b) * steering_.col(static_cast<Eigen::Index>(k));
    }
    if (sc.noise_power > 0.0) {
        std::normal_distribution<double> gauss(0.0, std::sqrt(sc.noise_power / 2.0));
        for (Eigen::Index p = 0; p < m; ++p) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            snap.received[p] += Complex(re, im);
        }
    }
    return snap;
}

Snapshot emit_snapshot(const Scenario& scenario, std::size_t index, Rng& rng) {
    return SnapshotSource(scenario).next(index, rng);
}

namespace {

CMatrix covariance_from(const Scenario& scenario, std::size_t index, std::size_t first_source) {
    const auto m = static_cast<Eigen::Index>(scenario.geometry.elements);
    CMatrix R = scenario.noise_power * CMatrix::Identity(m, m);
    for (std::size_t k = first_source; k < scenario.sources.size(); ++k) {
        const auto& src = scenario.sources[k];
        if (!src.active_at(index)) continue;
        const CVector a = steering_vector(src.doa, scenario.geometry.elements, scenario.geometry.spacing_ratio);
        R += src.power * (a * a.adjoint());
    }
    return R;
}

}  // namespace

CMatrix interference_noise_covariance(const Scenario& scenario, std::size_t index) {
    return covariance_from(scenario, index, 1);
}

CMatrix ideal_covariance(const Scenario& scenario, std::size_t index) {
    return covariance_from(scenario, index, 0);
}

}  // namespace smcm
