#pragma once

// Reference computations that share no code with the production formulas.
// Used by the test suite and the validate command only.

#include <functional>

#include "smcm/array_model.hpp"

namespace smcm::oracles {

/// Deterministic CM cost J1(s) + sigma_n^2 J2(w~) with D = v^2 and
/// s_k = a_k^H w~ over the interferers (unit-power steering).
double cm_cost_model(const CVector& w_tilde, const Scenario& scenario, double v);

/// d^2 f / dw* dw^T of a real function by central differences on the real
/// and imaginary parts, step h.
CMatrix finite_difference_hessian(const std::function<double(const CVector&)>& f, const CVector& w, double h = 1e-4);

/// Gains s (length q) whose dropped pairing term sum_{i != l} s_i^2 conj(s_l)^2 is zero.
CVector phase_balanced_gains(std::size_t q, Rng& rng);

/// The cross term dropped by the pairing argument.
Complex dropped_cross_term(const CVector& s);

/// E[(r^H Q r)^2] for circular Gaussian r with covariance R and Hermitian Q.
double gaussian_quadratic_fourth_moment(const CMatrix& Q, const CMatrix& R);

/// Step size found by bisection so that |y (1 - mu e q_br)| hits `target`.
double bisect_projection_step(Complex y, double q_br, double target);

}  // namespace smcm::oracles
