#include "smcm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smcm/baselines.hpp"

namespace smcm {

std::string_view to_string(MseForm form) { return form == MseForm::Simplified ? "simplified" : "full"; }

MseForm mse_form_from_string(std::string_view name) {
    if (name == "simplified") return MseForm::Simplified;
    if (name == "full") return MseForm::Full;
    throw Error(ErrorKind::Config, "unknown MSE form '" + std::string(name) + "'");
}

ResidualPowers residual_powers(const CVector& w_tilde_opt, const Scenario& scenario) {
    ResidualPowers out;
    for (std::size_t k = 1; k < scenario.sources.size(); ++k) {
        const auto& src = scenario.sources[k];
        const CVector a = steering_vector(src.doa, scenario.geometry.elements, scenario.geometry.spacing_ratio);
        out.sigma_I2 += src.power * std::norm(w_tilde_opt.dot(a));
    }
    out.sigma_v2 = scenario.noise_power * w_tilde_opt.squaredNorm();
    return out;
}

BrMoments br_norm_moments(const BlockingMatrix& blocking, const Scenario& scenario, std::size_t samples,
                          Rng& rng) {
    BrMoments out;
    const CMatrix R = ideal_covariance(scenario, kSteadyStateIndex);
    const CMatrix& B = blocking.matrix;
    out.m2 = (B.adjoint() * B * R).trace().real();
    if (samples == 0) return out;

    const SnapshotSource source(scenario);
    double acc = 0.0;
    for (std::size_t n = 0; n < samples; ++n) {
        const Snapshot snap = source.next(kSteadyStateIndex, rng);
        const double p = (B * snap.received).squaredNorm();
        acc += p * p;
    }
    out.m4 = acc / static_cast<double>(samples);
    return out;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double update_probability(double gamma_mean, double sigma_v) {
    if (!(sigma_v > 0.0)) throw Error(ErrorKind::DegenerateNoise, "residual noise deviation must be positive");
    return std::clamp(2.0 * q_function(gamma_mean / sigma_v), 0.0, 1.0);
}

double gamma_mean_pdb(double lambda, double sigma_n, double w_opt_norm) {
    return std::sqrt(lambda) * sigma_n * w_opt_norm;
}

double gamma_mean_pidb(double psi, double nu_inf, double lambda, double sigma_n, double w_opt_norm) {
    return std::sqrt(psi * nu_inf) + gamma_mean_pdb(lambda, sigma_n, w_opt_norm);
}

double steady_state_nu(const CVector& w_aux, const BlockingMatrix& blocking, const Scenario& scenario) {
    const CMatrix Rin = interference_noise_covariance(scenario, kSteadyStateIndex);
    const CVector g = blocking.matrix.adjoint() * w_aux;
    return g.dot(Rin * g).real();
}

MuMoments mu_moments(double gamma_mean, double p_update, double m2_br, double m4_br) {
    if (gamma_mean == 0.0) throw Error(ErrorKind::UndefinedMoment, "E[gamma] = 0 makes the step-size moments undefined");
    MuMoments mu;
    mu.mu1 = gamma_mean * p_update + (1.0 - p_update) / (gamma_mean * m2_br);
    mu.mu2 = gamma_mean * p_update + (1.0 - p_update) / (gamma_mean * m4_br);
    return mu;
}

double mse_k1(double sI2, double sv2) { return 3.0 + 3.0 * sI2 * sI2 + 6.0 * sI2 * sv2 + 3.0 * sv2 * sv2; }

double mse_k2(double sI2, double sv2) {
    const double sI4 = sI2 * sI2;
    const double sv4 = sv2 * sv2;
    return sv4 * sv2 + 3.0 * sI2 * sv4 + 3.0 * sI4 * sv2 + sI4 * sI2 + sv4 + 2.0 * sI2 * sv2 + sI4 + 4.0 * sv2 +
           2.0 * sI2 + 2.0;
}

namespace {

double checked_ratio(double num, double den) {
    if (!(den > 0.0)) {
        throw Error(ErrorKind::PredictionOutOfDomain,
                    "excess-MSE denominator is not positive (step-size moments too large for a finite steady state)");
    }
    return num / den;
}

}  // namespace

double excess_mse_full(const PredictionInputs& in, const MuMoments& mu) {
    const double num = mu.mu2 * in.m2_br * mse_k2(in.sigma_I2, in.sigma_v2);
    const double den = 2.0 * mu.mu1 * (in.sigma_I2 + in.sigma_v2) - mu.mu2 * in.m2_br * mse_k1(in.sigma_I2, in.sigma_v2);
    return checked_ratio(num, den);
}

double excess_mse_simplified(const PredictionInputs& in, const MuMoments& mu) {
    const double sv2 = in.sigma_v2;
    const double sv4 = sv2 * sv2;
    const double num = mu.mu2 * in.m2_br * (sv4 * sv2 + sv4 + 4.0 * sv2 + 2.0);
    const double den = 2.0 * mu.mu1 * sv2 - mu.mu2 * in.m2_br * (3.0 + 3.0 * sv4);
    return checked_ratio(num, den);
}

double excess_mse(const PredictionInputs& in, const MuMoments& mu, MseForm form) {
    return form == MseForm::Full ? excess_mse_full(in, mu) : excess_mse_simplified(in, mu);
}

double minimum_mse(const CVector& w_tilde, const Scenario& scenario) {
    const CMatrix R = ideal_covariance(scenario, kSteadyStateIndex);
    const CVector a0 = scenario.desired_steering();
    const double amp = std::sqrt(scenario.desired().power);
    return 1.0 - 2.0 * amp * w_tilde.dot(a0).real() + w_tilde.dot(R * w_tilde).real();
}

SteadyStatePrediction predict_steady_state(const Scenario& scenario, const SteadyStateOptions& options, Rng& rng) {
    SteadyStatePrediction out;
    const CVector a0 = scenario.desired_steering();
    const CMatrix R = ideal_covariance(scenario, kSteadyStateIndex);

    std::vector<CVector> calibration;
    calibration.reserve(options.calibration_snapshots);
    const SnapshotSource source(scenario);
    for (std::size_t n = 0; n < options.calibration_snapshots; ++n) {
        calibration.push_back(source.next(kSteadyStateIndex, rng).received);
    }
    out.w_tilde_opt = scaled_wiener(R, a0, calibration, scenario.desired().power);

    const BlockingMatrix B = make_blocking(options.blocking, a0);
    const ResidualPowers res = residual_powers(out.w_tilde_opt, scenario);
    const BrMoments mom = br_norm_moments(B, scenario, options.br_samples, rng);

    auto& in = out.inputs;
    in.sigma_I2 = res.sigma_I2;
    in.sigma_v2 = res.sigma_v2;
    in.m2_br = mom.m2;
    in.m4_br = mom.m4;
    in.w_opt_norm2 = out.w_tilde_opt.squaredNorm();
    in.xi_min = minimum_mse(out.w_tilde_opt, scenario);

    // Auxiliary-branch part of the optimum: B^H w_opt = -P w~_opt.
    const CVector w_aux = -(B.matrix * out.w_tilde_opt);
    out.nu_inf = steady_state_nu(w_aux, B, scenario);

    const double sigma_n = std::sqrt(scenario.noise_power);
    const double w_norm = std::sqrt(in.w_opt_norm2);
    switch (options.scheme.kind) {
        case BoundKind::Fixed: in.gamma_mean = options.scheme.gamma_fixed; break;
        case BoundKind::Pdb: in.gamma_mean = gamma_mean_pdb(options.scheme.lambda, sigma_n, w_norm); break;
        case BoundKind::Pidb:
            in.gamma_mean = gamma_mean_pidb(options.scheme.psi, out.nu_inf, options.scheme.lambda, sigma_n, w_norm);
            break;
    }

    auto& p = out.prediction;
    p.p_update = update_probability(in.gamma_mean, std::sqrt(in.sigma_v2));
    const MuMoments mu = mu_moments(in.gamma_mean, p.p_update, in.m2_br, in.m4_br);
    p.mu1 = mu.mu1;
    p.mu2 = mu.mu2;
    try {
        p.xi_ex = excess_mse(in, mu, options.form);
        p.xi_total = steady_state_mse(in, p);
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::PredictionOutOfDomain) throw;
        out.in_domain = false;
        p.xi_ex = std::numeric_limits<double>::quiet_NaN();
        p.xi_total = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

CMatrix estimate_rdr(const Scenario& scenario, const CVector& w_tilde_opt, const BlockingMatrix& blocking,
                     std::size_t samples, Rng& rng) {
    const auto m = static_cast<Eigen::Index>(scenario.geometry.elements);
    const CMatrix BhB = blocking.matrix.adjoint() * blocking.matrix;
    CMatrix acc = CMatrix::Zero(m, m);
    const SnapshotSource source(scenario);
    for (std::size_t n = 0; n < samples; ++n) {
        const CVector r = source.next(kSteadyStateIndex, rng).received;
        const double e = prediction_error(w_tilde_opt.dot(r));
        acc.noalias() += e * ((BhB * r) * r.adjoint());
    }
    return acc / static_cast<double>(std::max<std::size_t>(samples, 1));
}

double stability_bound(const CMatrix& r_dr) {
    if (r_dr.rows() != r_dr.cols()) throw Error(ErrorKind::InvalidState, "R_dr must be square");
    Eigen::ComplexEigenSolver<CMatrix> es(r_dr, false);
    const double largest = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(largest > 0.0)) throw Error(ErrorKind::UndefinedBound, "R_dr has no nonzero eigenvalue");
    return 2.0 / largest;
}

CMatrix cm_hessian(const CVector& w_tilde, const Scenario& scenario, double v) {
    const auto m = static_cast<Eigen::Index>(scenario.geometry.elements);
    if (w_tilde.size() != m) throw Error(ErrorKind::InvalidState, "w~ length must equal the array size");
    const CMatrix A = scenario.steering_matrix().rightCols(static_cast<Eigen::Index>(scenario.sources.size()) - 1);
    const double D = v * v;
    const double sigma2 = scenario.noise_power;
    const CVector s = A.adjoint() * w_tilde;
    const double u = s.squaredNorm();
    const double t = w_tilde.squaredNorm();
    const auto I = CMatrix::Identity(m, m);

    CMatrix M = CMatrix::Zero(m, m);
    if (A.cols() > 0) {
        CMatrix inner = (D - 0.5 + u) * CMatrix::Identity(A.cols(), A.cols()) + s * s.adjoint();
        inner.diagonal() -= s.cwiseAbs2().cast<Complex>();
        M = 4.0 * A * inner * A.adjoint();
    }
    if (sigma2 != 0.0) {
        const CMatrix AAh = A * A.adjoint();
        const CMatrix wwh = w_tilde * w_tilde.adjoint();
        CMatrix M2 = (4.0 * D - 2.0 + 4.0 * u) * I + 4.0 * t * AAh + 4.0 * (AAh * wwh + wwh * AAh) +
                     6.0 * sigma2 * (t * I + wwh);
        M += sigma2 * M2;
    }
    return M;
}

double convexity_probe(const Scenario& scenario, double v, std::size_t trials, double region_radius, Rng& rng) {
    const auto m = static_cast<Eigen::Index>(scenario.geometry.elements);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < std::max<std::size_t>(trials, 1); ++t) {
        CVector w(m);
        for (Eigen::Index p = 0; p < m; ++p) w[p] = Complex(gauss(rng), gauss(rng));
        // Uniform in the ball of C^m = R^{2m}.
        const double radius = region_radius * std::pow(unit(rng), 1.0 / (2.0 * static_cast<double>(m)));
        w *= radius / w.norm();

        const CMatrix M = cm_hessian(w, scenario, v);
        const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
        if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
            throw Error(ErrorKind::InvalidState, "assembled Hessian is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(M, Eigen::EigenvaluesOnly);
        lowest = std::min(lowest, es.eigenvalues().minCoeff());
    }
    return lowest;
}

double fourth_moment_paper(const CVector& s) {
    double quartic = 0.0;
    double total2 = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double p = std::norm(s[i]);
        quartic += p * p;
        total2 += p;
    }
    // sum_{i != l} |s_i|^2 |s_l|^2 = (sum |s_i|^2)^2 - sum |s_i|^4
    return quartic + 2.0 * (total2 * total2 - quartic);
}

double fourth_moment_bruteforce(const CVector& s) {
    const auto q = static_cast<std::size_t>(s.size());
    if (q > kFourthMomentMaxTerms) {
        throw Error(ErrorKind::EnumerationLimit, "brute-force fourth moment limited to 20 terms");
    }
    const std::size_t combos = std::size_t{1} << q;
    double acc = 0.0;
    for (std::size_t mask = 0; mask < combos; ++mask) {
        Complex z{};
        for (std::size_t i = 0; i < q; ++i) {
            const double b = (mask >> i) & 1u ? -1.0 : 1.0;
            z += std::conj(s[static_cast<Eigen::Index>(i)]) * b;
        }
        const double p = std::norm(z);
        acc += p * p;
    }
    return acc / static_cast<double>(combos);
}

}  // namespace smcm
