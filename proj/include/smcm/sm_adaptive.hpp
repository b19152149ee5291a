#pragma once

#include <cstddef>
#include <string_view>

#include "smcm/gsc_core.hpp"

namespace smcm {

enum class BoundKind { Fixed, Pdb, Pidb };

std::string_view to_string(BoundKind kind);
BoundKind bound_kind_from_string(std::string_view name);

/// Upper clamp on the error bound. Above 1 the lower strip no longer exists.
inline constexpr double kGammaMax = 10.0;

struct BoundScheme {
    BoundKind kind = BoundKind::Fixed;
    double gamma_fixed = 0.6;
    double rho = 0.98;     // forgetting factor
    double lambda = 2.0;   // noise-term tuning, > 1
    double psi = 0.003;    // interference-term weight (PIDB only)

    void validate() const;
    bool operator==(const BoundScheme&) const = default;
};

struct BoundState {
    double gamma = 0.0;
    double nu = 0.0;  // interference-plus-noise power estimate
};

struct SmUpdateRecord {
    bool updated = false;
    double mu = 0.0;
    Complex y_prior{};
    Complex y_posterior{};
    bool undefined_projection = false;  // |y| = 0 inside the lower strip
};

/// Which side of the constraint set the output modulus falls on.
enum class Strip { Inside, Upper, Lower };

/// Upper when e > gamma, Lower when gamma < 1 and e < -gamma, else Inside.
Strip active_strip(Complex y, double gamma);

/// Step size that projects |y| onto the nearest boundary sqrt(1 +/- gamma)
/// along the CM gradient. q_br is r^H B^H B r.
///
/// Returns 0 inside the constraint set. Throws DegenerateSnapshot when
/// q_br <= 0 and UndefinedProjection when y = 0 in the lower strip.
double sm_step_size(Complex y, double gamma, double q_br);

/// One data-selective SG step on `state` with bound `bound.gamma`.
SmUpdateRecord sm_cm_gsc_update(GscState& state, const BoundState& bound, const CVector& r);

BoundState bound_update_pdb(const BoundState& bound, const CVector& w_tilde, double noise_power,
                            const BoundScheme& scheme);
BoundState interference_power_update(const BoundState& bound, Complex aux_output, const BoundScheme& scheme);
BoundState bound_update_pidb(const BoundState& bound, const CVector& w_tilde, double noise_power,
                             const BoundScheme& scheme);

/// SM-CM-GSC beamformer with its bound scheduler. Per snapshot: adapt with
/// gamma(i), then update nu, then move the bound to gamma(i+1).
class SmCmGsc {
public:
    SmCmGsc(GscState state, BoundScheme scheme, double noise_power);

    SmUpdateRecord step(const CVector& r);

    const GscState& state() const { return state_; }
    const BoundState& bound() const { return bound_; }
    const BoundScheme& scheme() const { return scheme_; }
    CVector weights() const { return effective_weights(state_); }
    std::size_t undefined_projections() const { return undefined_projections_; }

private:
    GscState state_;
    BoundScheme scheme_;
    BoundState bound_;
    double noise_power_;
    std::size_t undefined_projections_ = 0;
};

namespace detail {
/// w <- w - mu (1 - |y|^2) B r y*. Shared by every CM-GSC variant.
void apply_cm_gradient_step(CVector& w, const CVector& Br, Complex y, double mu);
}  // namespace detail

}  // namespace smcm
