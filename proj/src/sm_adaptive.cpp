#include "smcm/sm_adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smcm {

std::string_view to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::Fixed: return "fixed";
        case BoundKind::Pdb: return "pdb";
        case BoundKind::Pidb: return "pidb";
    }
    return "fixed";
}

BoundKind bound_kind_from_string(std::string_view name) {
    if (name == "fixed") return BoundKind::Fixed;
    if (name == "pdb") return BoundKind::Pdb;
    if (name == "pidb") return BoundKind::Pidb;
    throw Error(ErrorKind::Config, "unknown bound kind '" + std::string(name) + "'");
}

void BoundScheme::validate() const {
    if (kind == BoundKind::Fixed) {
        if (!(gamma_fixed >= 0.0)) throw Error(ErrorKind::Config, "bound.gamma must be >= 0");
        return;
    }
    if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::Config, "bound.rho must lie in (0, 1)");
    if (!(lambda > 1.0)) throw Error(ErrorKind::Config, "bound.lambda must be > 1");
    if (!(psi >= 0.0)) throw Error(ErrorKind::Config, "bound.psi must be >= 0");
}

Strip active_strip(Complex y, double gamma) {
    const double e = prediction_error(y);
    if (e > gamma) return Strip::Upper;
    if (gamma < 1.0 && e < -gamma) return Strip::Lower;
    return Strip::Inside;
}

double sm_step_size(Complex y, double gamma, double q_br) {
    if (!(q_br > 0.0)) {
        throw Error(ErrorKind::DegenerateSnapshot, "blocked snapshot has zero energy");
    }
    const Strip strip = active_strip(y, gamma);
    if (strip == Strip::Inside) return 0.0;

    const double mag = std::abs(y);
    if (strip == Strip::Lower && mag == 0.0) {
        throw Error(ErrorKind::UndefinedProjection, "zero output cannot be projected onto the lower strip");
    }
    const double denom = prediction_error(y) * q_br;
    if (std::abs(denom) < 1e-300) return 0.0;

    const double target = std::sqrt(strip == Strip::Upper ? 1.0 + gamma : 1.0 - gamma);
    return (1.0 - target / mag) / denom;
}

namespace detail {

void apply_cm_gradient_step(CVector& w, const CVector& Br, Complex y, double mu) {
    const Complex scale = mu * (1.0 - std::norm(y)) * std::conj(y);
    w -= scale * Br;
}

}  // namespace detail

SmUpdateRecord sm_cm_gsc_update(GscState& state, const BoundState& bound, const CVector& r) {
    SmUpdateRecord rec;
    rec.y_prior = gsc_output(effective_weights(state), r);
    rec.y_posterior = rec.y_prior;

    const double e = prediction_error(rec.y_prior);
    if (!(e * e > bound.gamma * bound.gamma) || active_strip(rec.y_prior, bound.gamma) == Strip::Inside) {
        return rec;
    }

    const CVector Br = state.blocking.matrix * r;
    double mu = 0.0;
    try {
        mu = sm_step_size(rec.y_prior, bound.gamma, Br.squaredNorm());
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::UndefinedProjection) throw;
        rec.undefined_projection = true;
        return rec;
    }
    if (mu == 0.0) return rec;

    detail::apply_cm_gradient_step(state.w, Br, rec.y_prior, mu);
    rec.updated = true;
    rec.mu = mu;
    rec.y_posterior = gsc_output(effective_weights(state), r);
    return rec;
}

namespace {

double clamp_gamma(double g) { return std::clamp(g, 0.0, kGammaMax); }

double noise_term(const CVector& w_tilde, double noise_power, const BoundScheme& scheme) {
    return std::sqrt(scheme.lambda * w_tilde.squaredNorm() * noise_power);
}

}  // namespace

BoundState bound_update_pdb(const BoundState& bound, const CVector& w_tilde, double noise_power,
                            const BoundScheme& scheme) {
    BoundState next = bound;
    next.gamma = clamp_gamma((1.0 - scheme.rho) * bound.gamma + scheme.rho * noise_term(w_tilde, noise_power, scheme));
    return next;
}

BoundState interference_power_update(const BoundState& bound, Complex aux_output, const BoundScheme& scheme) {
    BoundState next = bound;
    next.nu = (1.0 - scheme.rho) * bound.nu + scheme.rho * std::norm(aux_output);
    return next;
}

BoundState bound_update_pidb(const BoundState& bound, const CVector& w_tilde, double noise_power,
                             const BoundScheme& scheme) {
    BoundState next = bound;
    const double interference = std::sqrt(scheme.psi * bound.nu);
    next.gamma = clamp_gamma((1.0 - scheme.rho) * bound.gamma +
                             scheme.rho * (interference + noise_term(w_tilde, noise_power, scheme)));
    return next;
}

SmCmGsc::SmCmGsc(GscState state, BoundScheme scheme, double noise_power)
    : state_(std::move(state)), scheme_(scheme), noise_power_(noise_power) {
    scheme_.validate();
    if (scheme_.kind == BoundKind::Fixed) bound_.gamma = scheme_.gamma_fixed;
}

SmUpdateRecord SmCmGsc::step(const CVector& r) {
    // Bound recursions use quantities at time i, i.e. before adaptation.
    const CVector w_tilde = effective_weights(state_);
    Complex aux{};
    if (scheme_.kind == BoundKind::Pidb) aux = state_.w.dot(state_.blocking.matrix * r);

    SmUpdateRecord rec = sm_cm_gsc_update(state_, bound_, r);
    if (rec.undefined_projection) ++undefined_projections_;

    switch (scheme_.kind) {
        case BoundKind::Fixed:
            break;
        case BoundKind::Pdb:
            bound_ = bound_update_pdb(bound_, w_tilde, noise_power_, scheme_);
            break;
        case BoundKind::Pidb:
            bound_ = interference_power_update(bound_, aux, scheme_);
            bound_ = bound_update_pidb(bound_, w_tilde, noise_power_, scheme_);
            break;
    }
    return rec;
}

}  // namespace smcm
