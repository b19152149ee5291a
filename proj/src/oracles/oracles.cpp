#include "smcm/oracles.hpp"

#include <cmath>

namespace smcm::oracles {

double cm_cost_model(const CVector& w_tilde, const Scenario& scenario, double v) {
    const std::size_t m = scenario.geometry.elements;
    const double D = v * v;
    double u = 0.0;
    double quartic = 0.0;
    for (std::size_t k = 1; k < scenario.sources.size(); ++k) {
        const CVector a = steering_vector(scenario.sources[k].doa, m, scenario.geometry.spacing_ratio);
        const double p = std::norm(a.dot(w_tilde));
        u += p;
        quartic += p * p;
    }
    const double t = w_tilde.squaredNorm();
    const double j1 = 2.0 * (D + u) * (D + u) - D * D - quartic - 2.0 * (D + u) + 1.0;
    const double j2 = (4.0 * (D + u) - 2.0 + 3.0 * scenario.noise_power * t) * t;
    return j1 + scenario.noise_power * j2;
}

CMatrix finite_difference_hessian(const std::function<double(const CVector&)>& f, const CVector& w, double h) {
    const Eigen::Index n = w.size();
    const Complex dir[2] = {Complex(1.0, 0.0), Complex(0.0, 1.0)};
    // H[a][b](i, k) = d^2 f / d(part a of w_i) d(part b of w_k)
    Eigen::MatrixXd H[2][2];
    for (auto& row : H)
        for (auto& blk : row) blk = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index k = 0; k < n; ++k) {
                    auto eval = [&](double si, double sk) {
                        CVector x = w;
                        x[i] += si * h * dir[a];
                        x[k] += sk * h * dir[b];
                        return f(x);
                    };
                    H[a][b](i, k) = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h * h);
                }
            }
        }
    }
    CMatrix M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            M(i, k) = 0.25 * Complex(H[0][0](i, k) + H[1][1](i, k), H[1][0](i, k) - H[0][1](i, k));
        }
    }
    return M;
}

Complex dropped_cross_term(const CVector& s) {
    Complex acc{};
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        for (Eigen::Index l = 0; l < s.size(); ++l) {
            if (i != l) acc += s[i] * s[i] * std::conj(s[l] * s[l]);
        }
    }
    return acc;
}

CVector phase_balanced_gains(std::size_t q, Rng& rng) {
    // The cross term equals |sum s_i^2|^2 - sum |s_i|^4, so the last gain is
    // chosen to make |sum s_i^2|^2 = sum |s_i|^4.
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVector s(static_cast<Eigen::Index>(q));
    if (q == 0) return s;
    while (true) {
        for (std::size_t i = 0; i + 1 < q; ++i) s[static_cast<Eigen::Index>(i)] = Complex(gauss(rng), gauss(rng));
        Complex c{};
        double quartic = 0.0;
        for (std::size_t i = 0; i + 1 < q; ++i) {
            const Complex z = s[static_cast<Eigen::Index>(i)];
            c += z * z;
            quartic += std::norm(z) * std::norm(z);
        }
        const double K = quartic - std::norm(c);
        // Need |c + x|^2 = quartic + rho^4 with x = rho^2 e^{j phi}:
        // |c|^2 + 2 rho^2 |c| cos(phi - arg c) = quartic, i.e. cos(.) = K / (2 rho^2 |c|).
        const double abs_c = std::abs(c);
        if (q == 1 || abs_c < 1e-6) {
            if (q == 1) {
                // A single gain has no cross term at all.
                s[0] = Complex(gauss(rng), gauss(rng));
                return s;
            }
            continue;
        }
        const double rho2 = std::max(1.0, std::abs(K) / (2.0 * abs_c)) * (1.0 + std::abs(gauss(rng)));
        const double phi = std::arg(c) + std::acos(K / (2.0 * rho2 * abs_c));
        s[static_cast<Eigen::Index>(q - 1)] = std::sqrt(rho2) * std::polar(1.0, phi / 2.0);
        return s;
    }
}

double gaussian_quadratic_fourth_moment(const CMatrix& Q, const CMatrix& R) {
    const CMatrix QR = Q * R;
    const Complex tr = QR.trace();
    return std::norm(tr) + (QR * QR).trace().real();
}

double bisect_projection_step(Complex y, double q_br, double target) {
    const double e = std::norm(y) - 1.0;
    const double mod = std::abs(y);
    // |y| |1 - mu e q| is monotone in mu on the bracket below.
    double lo = 0.0;
    double hi = e > 0.0 ? 1.0 / (e * q_br) : target / (mod * -e * q_br);
    const bool decreasing = mod > target;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double val = mod * std::abs(1.0 - mid * e * q_br);
        if ((val > target) == decreasing) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace smcm::oracles
