#include "smcm/baselines.hpp"

#include <cmath>
#include <limits>

namespace smcm {

Complex cm_gsc_sg_update(GscState& state, const CVector& r, double mu) {
    const CVector Br = state.blocking.matrix * r;
    const Complex y = state.v * state.a0.dot(r) - state.w.dot(Br);
    detail::apply_cm_gradient_step(state.w, Br, y, mu);
    return y;
}

Complex mv_gsc_sg_update(GscState& state, const CVector& r, double mu) {
    const CVector Br = state.blocking.matrix * r;
    const Complex y = state.v * state.a0.dot(r) - state.w.dot(Br);
    state.w += (mu * std::conj(y)) * Br;
    return y;
}

CVector mvdr_weights(const CMatrix& R, const CVector& a0) {
    Eigen::LLT<CMatrix> llt(R);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::NonInvertibleCovariance, "covariance is not positive definite");
    }
    const CVector Ria = llt.solve(a0);
    const Complex gain = a0.dot(Ria);
    if (!(std::abs(gain) > 0.0) || !std::isfinite(std::abs(gain))) {
        throw Error(ErrorKind::NonInvertibleCovariance, "a0^H R^-1 a0 vanished");
    }
    return Ria / std::conj(gain);
}

SmUpdateRecord sm_cm_dfp_update(CVector& w, const CVector& r, double gamma, const CVector& a0, double v) {
    if (std::abs(w.dot(a0) - v) > 1e-8 * std::max(1.0, std::abs(v))) {
        throw Error(ErrorKind::InvalidState, "direct-form weights violate w^H a0 = v");
    }
    SmUpdateRecord rec;
    rec.y_prior = w.dot(r);
    rec.y_posterior = rec.y_prior;
    if (active_strip(rec.y_prior, gamma) == Strip::Inside) return rec;

    const CVector Pr = r - a0 * a0.dot(r);
    double mu = 0.0;
    try {
        mu = sm_step_size(rec.y_prior, gamma, Pr.squaredNorm());
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::UndefinedProjection) throw;
        rec.undefined_projection = true;
        return rec;
    }
    if (mu == 0.0) return rec;

    // Descent on (|y|^2 - 1)^2 with y = w^H r, restricted to the constraint plane.
    w -= (mu * prediction_error(rec.y_prior) * std::conj(rec.y_prior)) * Pr;
    rec.updated = true;
    rec.mu = mu;
    rec.y_posterior = w.dot(r);
    return rec;
}

SmCmDfp::SmCmDfp(double v, CVector a0, BoundScheme scheme, double noise_power)
    : v_(v), a0_(std::move(a0)), w_(v_ * a0_), scheme_(scheme), noise_power_(noise_power) {
    scheme_.validate();
    if (scheme_.kind == BoundKind::Fixed) bound_.gamma = scheme_.gamma_fixed;
}

SmUpdateRecord SmCmDfp::step(const CVector& r) {
    const CVector w_prior = w_;
    // Interference estimate: the part of the output removed from the quiescent beam.
    const Complex aux = v_ * a0_.dot(r) - w_.dot(r);
    SmUpdateRecord rec = sm_cm_dfp_update(w_, r, bound_.gamma, a0_, v_);
    switch (scheme_.kind) {
        case BoundKind::Fixed:
            break;
        case BoundKind::Pdb:
            bound_ = bound_update_pdb(bound_, w_prior, noise_power_, scheme_);
            break;
        case BoundKind::Pidb:
            bound_ = interference_power_update(bound_, aux, scheme_);
            bound_ = bound_update_pidb(bound_, w_prior, noise_power_, scheme_);
            break;
    }
    return rec;
}

namespace {

double condition_number(const CMatrix& A) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace

CVector cm_gsc_fixed_point_iterate(std::span<const CVector> snapshots, const GscState& gsc,
                                   double max_condition, bool* regularized) {
    const auto n = gsc.blocking.rows();
    const auto count = static_cast<Eigen::Index>(snapshots.size());
    CMatrix R(gsc.a0.size(), count);
    for (Eigen::Index i = 0; i < count; ++i) R.col(i) = snapshots[static_cast<std::size_t>(i)];
    const CMatrix X = gsc.blocking.matrix * R;
    const CVector main = gsc.v * (R.adjoint() * gsc.a0).conjugate();
    const CVector y = main - (X.adjoint() * gsc.w).conjugate();
    const Eigen::ArrayXd p = y.cwiseAbs2().array();
    const CMatrix Xp = X * p.matrix().asDiagonal();
    CMatrix A = Xp * X.adjoint();
    const CVector coef = ((y.array() * main.array().conjugate() - 1.0) * y.array().conjugate()).matrix();
    CVector b = X * coef;
    const double inv_n = 1.0 / static_cast<double>(snapshots.size());
    A *= inv_n;
    b *= inv_n;

    if (condition_number(A) > max_condition) {
        double eps = 1e-8 * A.trace().real() / static_cast<double>(n);
        if (!(eps > 0.0)) eps = 1e-8;
        A.diagonal().array() += eps;
        if (regularized) *regularized = true;
    }
    return A.ldlt().solve(b);
}

FixedPointResult cm_gsc_fixed_point(std::span<const CVector> snapshots, const GscState& gsc,
                                    const FixedPointOptions& options) {
    if (snapshots.empty()) throw Error(ErrorKind::InvalidState, "fixed-point block is empty");
    GscState work = gsc;
    FixedPointResult result;
    for (std::size_t it = 0; it < options.max_iters; ++it) {
        bool reg = false;
        CVector next = cm_gsc_fixed_point_iterate(snapshots, work, options.max_condition, &reg);
        result.regularized = result.regularized || reg;
        const double step = (next - work.w).norm();
        const double scale = 1.0 + work.w.norm();
        work.w = std::move(next);
        result.iterations = it + 1;
        if (step < options.tol * scale) {
            result.converged = true;
            break;
        }
    }
    result.w = std::move(work.w);
    return result;
}

CVector scaled_wiener(const CMatrix& R, const CVector& a0, std::span<const CVector> calibration,
                      double desired_power) {
    Eigen::LLT<CMatrix> llt(R);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::NonInvertibleCovariance, "covariance is not positive definite");
    }
    const CVector w_mmse = llt.solve(std::sqrt(desired_power) * a0);
    if (calibration.empty()) throw Error(ErrorKind::InvalidState, "calibration block is empty");
    double m2 = 0.0;
    double m4 = 0.0;
    for (const CVector& r : calibration) {
        const double p = std::norm(w_mmse.dot(r));
        m2 += p;
        m4 += p * p;
    }
    if (!(m4 > 0.0)) throw Error(ErrorKind::InvalidState, "calibration output has zero power");
    return std::sqrt(m2 / m4) * w_mmse;
}

double sample_cm_cost(const CVector& w_tilde, std::span<const CVector> block) {
    double acc = 0.0;
    for (const CVector& r : block) {
        const double e = prediction_error(w_tilde.dot(r));
        acc += e * e;
    }
    return acc / static_cast<double>(block.size());
}

}  // namespace smcm
