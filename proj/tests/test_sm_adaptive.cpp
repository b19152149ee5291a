#include <doctest.h>

#include <cmath>

#include "smcm/array_model.hpp"
#include "smcm/oracles.hpp"
#include "smcm/sm_adaptive.hpp"

using namespace smcm;

namespace {

CVector pair_a0() { return CVector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0)); }

// |y (1 - mu e q)|, the a-posteriori modulus along the CM gradient.
double posterior_modulus(Complex y, double mu, double q) {
    return std::abs(y * (1.0 - mu * prediction_error(y) * q));
}

}  // namespace

TEST_CASE("step size examples") {
    CHECK(sm_step_size(Complex(1.0, 0), 0.6, 1.0) == 0.0);

    const double up = sm_step_size(Complex(2.0, 0), 0.0, 1.0);
    CHECK(up == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(posterior_modulus(Complex(2.0, 0), up, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

    const double low = sm_step_size(Complex(0.5, 0), 0.19, 1.0);
    CHECK(low == doctest::Approx(16.0 / 15.0).epsilon(1e-14));
    CHECK(posterior_modulus(Complex(0.5, 0), low, 1.0) == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("step size matches a bisection of the projection condition") {
    Rng rng(1);
    std::uniform_real_distribution<double> mag(0.05, 3.0), ph(0.0, 2 * kPi), gam(0.0, 0.95), q(0.1, 20.0);
    int checked = 0;
    for (int t = 0; t < 2000; ++t) {
        const Complex y = std::polar(mag(rng), ph(rng));
        const double g = gam(rng), qb = q(rng);
        const Strip strip = active_strip(y, g);
        const double mu = sm_step_size(y, g, qb);
        if (strip == Strip::Inside) {
            CHECK(mu == 0.0);
            continue;
        }
        const double target = std::sqrt(strip == Strip::Upper ? 1.0 + g : 1.0 - g);
        const double ref = oracles::bisect_projection_step(y, qb, target);
        CHECK(std::abs(mu - ref) <= 1e-9 * std::abs(ref));
        ++checked;
    }
    CHECK(checked > 500);
}

TEST_CASE("minimal disturbance picks the nearer boundary") {
    Rng rng(2);
    std::uniform_real_distribution<double> mag(0.05, 3.0), gam(0.01, 0.95);
    for (int t = 0; t < 500; ++t) {
        const Complex y(mag(rng), 0.0);
        const double g = gam(rng);
        const double mu = sm_step_size(y, g, 1.0);
        if (mu == 0.0) continue;
        const double e = prediction_error(y);
        const double up = (1.0 - std::sqrt(1.0 + g) / std::abs(y)) / e;
        const double down = (1.0 - std::sqrt(1.0 - g) / std::abs(y)) / e;
        CHECK(std::abs(mu) <= std::min(std::abs(up), std::abs(down)) + 1e-15);
    }
}

TEST_CASE("step size errors and guards") {
    try {
        sm_step_size(Complex(2.0, 0), 0.1, 0.0);
        FAIL("expected degenerate-snapshot");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateSnapshot);
    }
    try {
        sm_step_size(Complex(0.0, 0), 0.1, 1.0);
        FAIL("expected undefined-projection");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UndefinedProjection);
    }
    // gamma >= 1 removes the lower strip.
    CHECK(sm_step_size(Complex(0.0, 0), 1.0, 1.0) == 0.0);
    CHECK(active_strip(Complex(0.01, 0), 1.5) == Strip::Inside);
    CHECK(active_strip(Complex(2.0, 0), 1.5) == Strip::Upper);
}

TEST_CASE("two-element hand evaluation") {
    const CVector a0 = pair_a0();
    GscState s = GscState::with_zero_start(1.0, a0, blocking_css(a0));
    CVector r(2);
    r << 2.0, 0.0;
    const SmUpdateRecord rec = sm_cm_gsc_update(s, BoundState{0.0, 0.0}, r);
    CHECK(rec.updated);
    CHECK(std::abs(rec.y_prior - Complex(std::sqrt(2.0), 0)) < 1e-14);
    CHECK(rec.mu == doctest::Approx((1.0 - 1.0 / std::sqrt(2.0)) / 2.0).epsilon(1e-13));
    CHECK(std::abs(s.w[0] - 0.2071) < 1e-4);
    CHECK(std::abs(s.w[1] + 0.2071) < 1e-4);
    CHECK(std::abs(std::abs(rec.y_posterior) - 1.0) < 1e-12);
}

TEST_CASE("no update inside the constraint set") {
    const CVector a0 = pair_a0();
    GscState s = GscState::with_zero_start(1.0, a0, blocking_css(a0));
    const CVector r = a0 * 1.1;  // |y| = 1.1, e = 0.21
    const CVector before = s.w;
    const SmUpdateRecord rec = sm_cm_gsc_update(s, BoundState{0.3, 0.0}, r);
    CHECK_FALSE(rec.updated);
    CHECK(rec.mu == 0.0);
    CHECK(rec.y_posterior == rec.y_prior);
    CHECK(s.w == before);
}

TEST_CASE("undefined projection is flagged without updating") {
    const CVector a0 = pair_a0();
    GscState s = GscState::with_zero_start(1.0, a0, blocking_css(a0));
    CVector r(2);
    r << 1.0, -1.0;  // orthogonal to a0, so y = 0 with w = 0
    const SmUpdateRecord rec = sm_cm_gsc_update(s, BoundState{0.2, 0.0}, r);
    CHECK(rec.undefined_projection);
    CHECK_FALSE(rec.updated);
    CHECK(s.w.norm() == 0.0);
}

TEST_CASE("projection exactness, selectivity and constraint over random runs") {
    Rng rng(3);
    std::size_t updates = 0;
    for (int t = 0; t < 30; ++t) {
        ScenarioDescription d;
        d.sources.resize(2 + t % 6);
        d.snr_db = 5.0 + t;
        const Scenario sc = build_scenario(d, rng);
        const CVector a0 = sc.desired_steering();
        BoundScheme scheme;
        scheme.kind = static_cast<BoundKind>(t % 3);
        scheme.gamma_fixed = 0.1 + 0.02 * t;
        const BlockingKind kind = t % 2 ? BlockingKind::Css : BlockingKind::Nullspace;
        SmCmGsc f(GscState::with_unit_start(1.0, a0, make_blocking(kind, a0)), scheme, sc.noise_power);
        const SnapshotSource src(sc);
        for (std::size_t i = 0; i < 400; ++i) {
            const double g = f.bound().gamma;
            const SmUpdateRecord rec = f.step(src.next(i, rng).received);
            const double e = prediction_error(rec.y_prior);
            CHECK(rec.updated == (e * e > g * g && !rec.undefined_projection));
            if (rec.updated) {
                ++updates;
                const double target = std::sqrt(1.0 + (e > 0 ? g : -g));
                CHECK(std::abs(std::abs(rec.y_posterior) - target) <= 1e-9 * target);
            } else {
                CHECK(rec.mu == 0.0);
            }
            CHECK(std::abs(f.weights().dot(a0) - 1.0) <= 1e-10);
        }
    }
    CHECK(updates > 1000);
}

TEST_CASE("gamma zero projects every snapshot onto the unit circle") {
    Rng rng(4);
    ScenarioDescription d;
    d.sources.resize(4);
    const Scenario sc = build_scenario(d, rng);
    const CVector a0 = sc.desired_steering();
    BoundScheme scheme;
    scheme.gamma_fixed = 0.0;
    SmCmGsc f(GscState::with_unit_start(1.0, a0, blocking_css(a0)), scheme, sc.noise_power);
    const SnapshotSource src(sc);
    for (std::size_t i = 0; i < 200; ++i) {
        const SmUpdateRecord rec = f.step(src.next(i, rng).received);
        if (std::norm(rec.y_prior) != 1.0) {
            CHECK(rec.updated);
            CHECK(std::abs(std::abs(rec.y_posterior) - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("bound recursion examples") {
    BoundScheme s;
    s.kind = BoundKind::Pdb;
    CVector w = CVector::Zero(4);
    w[0] = 1.0;
    const BoundState p = bound_update_pdb(BoundState{0.0, 0.0}, w, 0.01, s);
    CHECK(p.gamma == doctest::Approx(0.98 * std::sqrt(0.02)).epsilon(1e-14));
    CHECK(p.gamma == doctest::Approx(0.13859).epsilon(1e-4));

    BoundState fp{0.0, 0.0};
    for (int i = 0; i < 100; ++i) fp = bound_update_pdb(fp, w, 0.01, s);
    CHECK(fp.gamma == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));

    BoundScheme frozen = s;
    frozen.rho = 1e-300;
    CHECK(bound_update_pdb(BoundState{0.3, 0.0}, w, 0.01, frozen).gamma == doctest::Approx(0.3));

    s.kind = BoundKind::Pidb;
    const BoundState n = interference_power_update(BoundState{0.0, 0.0}, Complex(2.0, 0.0), s);
    CHECK(n.nu == doctest::Approx(3.92).epsilon(1e-14));
    BoundState nx{0.0, 0.0};
    for (int i = 0; i < 100; ++i) nx = interference_power_update(nx, Complex(0.0, 1.5), s);
    CHECK(nx.nu == doctest::Approx(2.25).epsilon(1e-12));

    const BoundState q = bound_update_pidb(BoundState{0.1, 1.0}, w, 0.01, s);
    CHECK(q.gamma == doctest::Approx(0.19427).epsilon(1e-4));

    BoundScheme nopsi = s;
    nopsi.psi = 0.0;
    CHECK(bound_update_pidb(BoundState{0.1, 5.0}, w, 0.01, nopsi).gamma ==
          bound_update_pdb(BoundState{0.1, 5.0}, w, 0.01, s).gamma);

    double last = -1.0;
    for (double nu = 0.0; nu < 10.0; nu += 0.5) {
        const double g = bound_update_pidb(BoundState{0.1, nu}, w, 0.01, s).gamma;
        CHECK(g >= last);
        last = g;
    }
}

TEST_CASE("gamma is clamped") {
    BoundScheme s;
    s.kind = BoundKind::Pdb;
    const CVector big = CVector::Constant(4, Complex(1e4, 0));
    CHECK(bound_update_pdb(BoundState{0.0, 0.0}, big, 1.0, s).gamma == kGammaMax);
}

TEST_CASE("scheme validation and names") {
    BoundScheme s;
    s.kind = BoundKind::Pdb;
    s.rho = 1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s.rho = 0.98;
    s.lambda = 1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s.lambda = 2.0;
    s.psi = -1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    CHECK(bound_kind_from_string("pidb") == BoundKind::Pidb);
    CHECK(to_string(BoundKind::Pdb) == "pdb");
    CHECK_THROWS_AS(bound_kind_from_string("adaptive"), Error);
}

TEST_CASE("time-varying bounds start at zero and follow the documented order") {
    const CVector a0 = pair_a0();
    BoundScheme s;
    s.kind = BoundKind::Pidb;
    SmCmGsc f(GscState::with_unit_start(1.0, a0, blocking_css(a0)), s, 0.01);
    CHECK(f.bound().gamma == 0.0);
    CHECK(f.bound().nu == 0.0);

    CVector r(2);
    r << Complex(0.3, 0.1), Complex(-0.7, 0.4);
    const GscState before = f.state();
    const CVector wt = effective_weights(before);
    const Complex aux = before.w.dot(before.blocking.matrix * r);
    f.step(r);
    BoundState expect = interference_power_update(BoundState{0.0, 0.0}, aux, s);
    expect = bound_update_pidb(expect, wt, 0.01, s);
    CHECK(f.bound().nu == expect.nu);
    CHECK(f.bound().gamma == expect.gamma);
}
