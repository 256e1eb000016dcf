#include "sncc/factorization.hpp"

#include <cmath>

namespace sncc {

RootInvariants root_invariants(const WorkingParams& wp) {
    const double w = wp.quantum_omega();
    const double g = wp.gamma_m;
    const double L2 = wp.lambda * wp.lambda;
    const double s = std::sin(wp.theta);
    const double s2t = std::sin(2.0 * wp.theta);
    const double th = (wp.lambda_tilde - wp.lambda) * (wp.lambda_tilde + wp.lambda);

    RootInvariants r;
    r.omega = w;
    const double q = 2.0 * w * w + L2 * s2t;           // a1 + gamma^2
    const double m = 4.0 * L2 * s * s * (L2 * s * s + th);  // a2 - q^2
    r.a1 = q - g * g;
    r.a2 = q * q + m;
    r.sqrt_a2 = std::sqrt(r.a2);
    r.disc = m + g * g * (2.0 * q - g * g);
    r.excess = q > 0.0 ? m / (r.sqrt_a2 + q) : r.sqrt_a2 - q;
    const double root = std::sqrt(r.excess + g * g);
    r.rate = g > 0.0 ? r.excess / (g + root) : root;
    // a2/4 - w^4 = L^2 Lt^2 s^2 + w^2 L^2 sin2theta
    const double num = L2 * (L2 + th) * s * s + w * w * L2 * s2t;
    const double den = 0.5 * r.sqrt_a2 + w * w;
    r.bbc_minus_w2 = den > 0.0 ? num / den : 0.5 * r.sqrt_a2 - w * w;
    return r;
}

std::array<double, 3> quartic_coefficients(const WorkingParams& wp) {
    const RootInvariants r = root_invariants(wp);
    return {1.0, -r.a1, 0.25 * r.a2};
}

namespace {

cplx lower_root(cplx u) {
    cplx z = std::sqrt(u);
    if (z.imag() > 0.0 || (z.imag() == 0.0 && z.real() < 0.0)) z = -z;
    return z;
}

}  // namespace

SpectralRoots spectral_roots(const WorkingParams& wp) {
    const RootInvariants inv = root_invariants(wp);
    const double g = wp.gamma_m;
    const double w = inv.omega;

    SpectralRoots r;
    r.inv = inv;
    r.a1 = inv.a1;
    r.a2 = inv.a2;

    const cplx sq = std::sqrt(cplx(4.0 * w * w - g * g, 0.0));
    r.eta = 0.5 * sq - cplx(0.0, 0.5 * g);
    r.eta_c = 0.5 * sq + cplx(0.0, 0.5 * g);

    if (inv.disc >= 0.0) {
        r.regime = RootRegime::ComplexPair;
        const double s = inv.a1 >= 0.0 ? inv.a1 + inv.sqrt_a2 : inv.disc / (inv.sqrt_a2 - inv.a1);
        r.a = 0.5 * std::sqrt(s);
        r.b = -0.5 * std::sqrt(inv.excess + g * g);
        r.beta = cplx(r.a, r.b);
        r.beta_c = cplx(r.a, -r.b);
    } else {
        r.regime = RootRegime::RealRoots;
        const double d = std::sqrt(-inv.disc);
        const double u1 = inv.a1 >= 0.0 ? 0.5 * (inv.a1 + d) : 0.5 * (inv.a1 - d);
        const double u2 = u1 != 0.0 ? 0.25 * inv.a2 / u1 : 0.5 * (inv.a1 - d);
        r.beta = lower_root(cplx(u1, 0.0));
        r.beta_c = -lower_root(cplx(u2, 0.0));
        r.a = r.beta.real();
        r.b = r.beta.imag();
    }
    r.near_degenerate = std::abs(r.beta - r.eta) < 1e-6 * wp.omega_m;
    return r;
}

namespace {

// (Omega - omega)(Omega + omega) keeps its digits near the resonance.
cplx shifted_square(const SpectralRoots& r, cplx omega) { return (omega - r.inv.omega) * (omega + r.inv.omega); }

}  // namespace

cplx phi_plus(const SpectralRoots& r, cplx omega) {
    if (r.regime == RootRegime::ComplexPair) {
        // (Omega - beta)(Omega + beta_c) and (Omega - eta)(Omega + eta_c) expanded around omega^2
        const double gamma = -2.0 * r.eta.imag();
        const cplx d = shifted_square(r, omega);
        return (d - r.inv.bbc_minus_w2 - cplx(0.0, 2.0 * r.b) * omega) / (d + cplx(0.0, gamma) * omega);
    }
    return (omega - r.beta) * (omega + r.beta_c) / ((omega - r.eta) * (omega + r.eta_c));
}

cplx phi_minus(const SpectralRoots& r, cplx omega) {
    if (r.regime == RootRegime::ComplexPair) {
        const double gamma = -2.0 * r.eta.imag();
        const cplx d = shifted_square(r, omega);
        return (d - r.inv.bbc_minus_w2 + cplx(0.0, 2.0 * r.b) * omega) / (d - cplx(0.0, gamma) * omega);
    }
    return (omega - std::conj(r.beta)) * (omega + std::conj(r.beta_c)) /
           ((omega - std::conj(r.eta)) * (omega + std::conj(r.eta_c)));
}

}  // namespace sncc
