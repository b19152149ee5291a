#pragma once

#include <cstddef>
#include <limits>
#include <string_view>

#include "smcm/array_model.hpp"
#include "smcm/gsc_core.hpp"
#include "smcm/sm_adaptive.hpp"

namespace smcm {

/// Snapshot index at which every source of a scenario is active.
inline constexpr std::size_t kSteadyStateIndex = std::numeric_limits<std::size_t>::max();

// ---------------------------------------------------------------------------
// Steady-state MSE prediction
// ---------------------------------------------------------------------------

struct PredictionInputs {
    double sigma_I2 = 0.0;     // residual interference power at the optimum
    double sigma_v2 = 0.0;     // residual noise power at the optimum
    double m2_br = 0.0;        // E[||B r||^2]
    double m4_br = 0.0;        // E[||B r||^4]
    double gamma_mean = 0.0;   // E[gamma] at steady state
    double w_opt_norm2 = 0.0;  // ||w~_opt||^2
    double xi_min = 0.0;
};

struct MsePrediction {
    double p_update = 0.0;
    double mu1 = 0.0;  // E[mu]
    double mu2 = 0.0;  // E[mu^2]
    double xi_ex = 0.0;
    double xi_total = 0.0;
};

enum class MseForm { Simplified, Full };

std::string_view to_string(MseForm form);
MseForm mse_form_from_string(std::string_view name);

struct ResidualPowers {
    double sigma_I2 = 0.0;
    double sigma_v2 = 0.0;
};

/// Output interference power sum_{k>=1} p_k |w^H a_k|^2 and noise power sigma_n^2 ||w||^2.
ResidualPowers residual_powers(const CVector& w_tilde_opt, const Scenario& scenario);

struct BrMoments {
    double m2 = 0.0;
    double m4 = 0.0;
};

/// m2 = trace(B^H B R) in closed form, m4 = Monte Carlo mean of ||B r||^4.
BrMoments br_norm_moments(const BlockingMatrix& blocking, const Scenario& scenario, std::size_t samples,
                          Rng& rng);

/// Standard normal tail probability, 0.5 erfc(x / sqrt 2).
double q_function(double x);

/// 2 Q(gamma_mean / sigma_v), clipped to [0, 1].
double update_probability(double gamma_mean, double sigma_v);

double gamma_mean_pdb(double lambda, double sigma_n, double w_opt_norm);
double gamma_mean_pidb(double psi, double nu_inf, double lambda, double sigma_n, double w_opt_norm);

/// E[|w^H B r|^2] = w^H B R_in B^H w with R_in the interference-plus-noise covariance.
double steady_state_nu(const CVector& w_aux, const BlockingMatrix& blocking, const Scenario& scenario);

struct MuMoments {
    double mu1 = 0.0;
    double mu2 = 0.0;
};

/// E[mu] = E[g] P + (1-P) / (E[g] m2),  E[mu^2] = E[g] P + (1-P) / (E[g] m4).
MuMoments mu_moments(double gamma_mean, double p_update, double m2_br, double m4_br);

/// Excess MSE from the energy-conservation relation. The full form keeps
/// sigma_I; the simplified form assumes sigma_I << sigma_v. Throws
/// PredictionOutOfDomain when the denominator is not positive.
double excess_mse_full(const PredictionInputs& in, const MuMoments& mu);
double excess_mse_simplified(const PredictionInputs& in, const MuMoments& mu);
double excess_mse(const PredictionInputs& in, const MuMoments& mu, MseForm form);

/// K1 and K2 of the full form.
double mse_k1(double sigma_I2, double sigma_v2);
double mse_k2(double sigma_I2, double sigma_v2);

inline double steady_state_mse(const PredictionInputs& in, const MsePrediction& p) { return in.xi_min + p.xi_ex; }

/// E|b0 - w^H r|^2 in closed form for BPSK b0 with unit modulus.
double minimum_mse(const CVector& w_tilde, const Scenario& scenario);

struct SteadyStateOptions {
    BoundScheme scheme;
    MseForm form = MseForm::Simplified;
    BlockingKind blocking = BlockingKind::Css;
    double v = 1.0;
    std::size_t br_samples = 100000;
    std::size_t calibration_snapshots = 2000;
};

struct SteadyStatePrediction {
    PredictionInputs inputs;
    MsePrediction prediction;
    CVector w_tilde_opt;
    double nu_inf = 0.0;
    bool in_domain = true;  // false when the excess-MSE denominator is not positive
};

/// Full prediction chain for one scenario: scaled Wiener optimum, residual
/// powers, ||Br|| moments, bound mean, update probability, step-size moments,
/// excess and total MSE.
SteadyStatePrediction predict_steady_state(const Scenario& scenario, const SteadyStateOptions& options, Rng& rng);

// ---------------------------------------------------------------------------
// Stability
// ---------------------------------------------------------------------------

/// Monte Carlo E[e d r^H] with d = B^H B r and e evaluated at w~_opt.
CMatrix estimate_rdr(const Scenario& scenario, const CVector& w_tilde_opt, const BlockingMatrix& blocking,
                     std::size_t samples, Rng& rng);

/// min_k 2 / |lambda_k| over the nonzero eigenvalues of a (non-Hermitian) matrix.
double stability_bound(const CMatrix& r_dr);

// ---------------------------------------------------------------------------
// Cost-surface curvature
// ---------------------------------------------------------------------------

/// Hessian d^2 J / dw~* dw~^T of J1(s) + sigma_n^2 J2(w~), with D = v^2 held
/// fixed and s_k = a_k^H w~ over the interferers.
CMatrix cm_hessian(const CVector& w_tilde, const Scenario& scenario, double v);

/// Smallest Hessian eigenvalue over random w~ with ||w~|| <= region_radius.
double convexity_probe(const Scenario& scenario, double v, std::size_t trials, double region_radius, Rng& rng);

// ---------------------------------------------------------------------------
// Fourth moment of a BPSK mixture
// ---------------------------------------------------------------------------

/// sum |s_i|^4 + 2 sum_{i != l} |s_i|^2 |s_l|^2, the pairing-based closed form.
double fourth_moment_paper(const CVector& s);

/// Exact E|s^H b|^4 over all b in {+-1}^q.
double fourth_moment_bruteforce(const CVector& s);

inline constexpr std::size_t kFourthMomentMaxTerms = 20;

}  // namespace smcm
