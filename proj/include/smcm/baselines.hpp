#pragma once

#include <cstddef>
#include <span>

#include "smcm/sm_adaptive.hpp"

namespace smcm {

/// Fixed-step CM-GSC: w <- w - mu (B r y* - |y|^2 B r y*). Returns the a-priori output.
Complex cm_gsc_sg_update(GscState& state, const CVector& r, double mu);

/// LMS on the output power: w <- w + mu B r y*. Returns the a-priori output.
Complex mv_gsc_sg_update(GscState& state, const CVector& r, double mu);

/// w = R^-1 a0 / (a0^H R^-1 a0).
CVector mvdr_weights(const CMatrix& R, const CVector& a0);

/// Direct-form SM-CM step with the constraint enforced by P = I - a0 a0^H.
/// Requires w^H a0 = v on entry and preserves it.
SmUpdateRecord sm_cm_dfp_update(CVector& w, const CVector& r, double gamma, const CVector& a0, double v);

/// Direct-form SM-CM beamformer with the same bound schedulers as SmCmGsc.
/// Starts from the quiescent weights v a0.
class SmCmDfp {
public:
    SmCmDfp(double v, CVector a0, BoundScheme scheme, double noise_power);

    SmUpdateRecord step(const CVector& r);
    const CVector& weights() const { return w_; }
    const BoundState& bound() const { return bound_; }

private:
    double v_;
    CVector a0_;
    CVector w_;
    BoundScheme scheme_;
    BoundState bound_;
    double noise_power_;
};

struct FixedPointResult {
    CVector w;
    std::size_t iterations = 0;
    bool converged = false;
    bool regularized = false;  // ridge term was needed on at least one iteration
};

struct FixedPointOptions {
    std::size_t max_iters = 200;
    double tol = 1e-8;
    double max_condition = 1e12;
};

/// Batch CM-GSC: iterates w <- (E[|y|^2 B r r^H B^H])^-1 E[(v y r^H a0 - 1) y* B r]
/// with expectations replaced by block averages, starting from `gsc.w`.
FixedPointResult cm_gsc_fixed_point(std::span<const CVector> snapshots, const GscState& gsc,
                                    const FixedPointOptions& options = {});

/// One sweep of the batch iteration, exposed for fixed-point checks.
CVector cm_gsc_fixed_point_iterate(std::span<const CVector> snapshots, const GscState& gsc,
                                   double max_condition = 1e12, bool* regularized = nullptr);

/// beta R^-1 a0, with beta^2 = mean|y|^2 / mean|y|^4 over the calibration block
/// (the CM-cost minimizing real scale).
CVector scaled_wiener(const CMatrix& R, const CVector& a0, std::span<const CVector> calibration,
                      double desired_power = 1.0);

/// Sample CM cost mean((|w^H r|^2 - 1)^2).
double sample_cm_cost(const CVector& w_tilde, std::span<const CVector> block);

}  // namespace smcm
