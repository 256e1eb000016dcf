#include "doctest.h"

#include <algorithm>

#include "sncc/factorization.hpp"
#include "sncc/spectra.hpp"
#include "test_support.hpp"

using namespace sncc;
using testing::rel;

namespace {

using ld = long double;
using lc = std::complex<long double>;

// Quantum-record spectrum times |R_q|^2 as a quadratic in u = Omega^2.
struct Quadratic {
    ld c1, c0;
};

Quadratic numerator(const WorkingParams& wp) {
    const ld w = wp.quantum_omega(), g = wp.gamma_m, L = wp.lambda, Lt = wp.lambda_tilde;
    const ld th = wp.theta;
    const ld s = std::sin(th), s2 = std::sin(2.0L * th);
    return {2.0L * w * w - g * g + L * L * s2, w * w * w * w + L * L * w * w * s2 + L * L * Lt * Lt * s * s};
}

// Both lower half-plane roots of Omega^4 - c1 Omega^2 + c0, Newton-polished on the quartic.
std::vector<lc> oracle_roots(const WorkingParams& wp) {
    const Quadratic q = numerator(wp);
    const lc d = std::sqrt(lc(q.c1 * q.c1 - 4.0L * q.c0, 0.0L));
    const lc big = 0.5L * (q.c1 + (q.c1 >= 0 ? d : -d));
    std::vector<lc> out;
    for (lc u : {big, q.c0 / big}) {
        lc z = std::sqrt(u);
        if (z.imag() > 0.0L) z = -z;
        for (int it = 0; it < 20; ++it) {
            const lc z2 = z * z;
            const lc f = z2 * z2 - q.c1 * z2 + q.c0;
            const lc df = 4.0L * z2 * z - 2.0L * q.c1 * z;
            if (std::abs(df) == 0.0L) break;
            z -= f / df;
        }
        out.push_back(z);
    }
    return out;
}

}  // namespace

TEST_SUITE("factorization") {

TEST_CASE("closed-form roots match an independent quartic solve") {
    std::mt19937_64 eng(11);
    double worst = 0.0;
    for (int d = 0; d < 200; ++d) {
        const WorkingParams wp = testing::random_params(eng);
        const SpectralRoots r = spectral_roots(wp);
        const auto z = oracle_roots(wp);
        const cplx z0(static_cast<double>(z[0].real()), static_cast<double>(z[0].imag()));
        const cplx z1(static_cast<double>(z[1].real()), static_cast<double>(z[1].imag()));
        const double scale = std::abs(r.beta);
        const double e = std::min(std::max(std::abs(r.beta - z0), std::abs(-r.beta_c - z1)),
                                  std::max(std::abs(r.beta - z1), std::abs(-r.beta_c - z0))) /
                         scale;
        worst = std::max(worst, e);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("quartic coefficients reproduce the direct spectrum numerator") {
    std::mt19937_64 eng(12);
    for (int d = 0; d < 50; ++d) {
        const WorkingParams wp = testing::random_params(eng);
        const auto c = quartic_coefficients(wp);
        const Quadratic q = numerator(wp);
        CHECK(c[0] == 1.0);
        CHECK(rel(-c[1], static_cast<double>(q.c1)) < 1e-12);
        CHECK(rel(c[2], static_cast<double>(q.c0)) < 1e-12);
    }
}

TEST_CASE("roots lie in the lower half plane with conjugate partners") {
    std::mt19937_64 eng(13);
    for (int d = 0; d < 100; ++d) {
        const SpectralRoots r = spectral_roots(testing::random_params(eng));
        CHECK(r.beta.imag() <= 0.0);
        CHECK(r.beta_c == std::conj(r.beta));
        CHECK(r.b < 0.0);
    }
}

TEST_CASE("phi_plus phi_minus reconstructs the spectrum") {
    std::mt19937_64 eng(14);
    double worst = 0.0;
    for (int d = 0; d < 40; ++d) {
        const WorkingParams wp = testing::random_params(eng);
        const SpectralRoots r = spectral_roots(wp);
        for (double w : testing::log_grid(1e-3 * wp.omega_m, 1e3 * wp.omega_m, 500)) {
            const cplx prod = phi_plus(r, w) * phi_minus(r, w);
            worst = std::max(worst, rel(prod, spectrum_quantum_direct(wp, w)));
            CHECK(std::abs(prod.imag()) <= 1e-10 * std::abs(prod));
        }
        const double wq = wp.quantum_omega();
        for (double x : {-1e-9, 0.0, 1e-9}) {
            const double w = wq * (1.0 + x);
            worst = std::max(worst, rel(phi_plus(r, w) * phi_minus(r, w), spectrum_quantum_direct(wp, w)));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("phi_plus is analytic and zero-free in the upper half plane") {
    std::mt19937_64 eng(15);
    for (int d = 0; d < 20; ++d) {
        const WorkingParams wp = testing::random_params(eng);
        const SpectralRoots r = spectral_roots(wp);
        const double w = wp.quantum_omega();
        for (double im : {1e-3, 0.1, 1.0, 10.0})
            for (double re : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
                const cplx z(re * w, im * w);
                CHECK(std::isfinite(std::abs(phi_plus(r, z))));
                CHECK(std::abs(phi_plus(r, z)) > 0.0);
            }
        // phi_minus(Omega) = conj(phi_plus(Omega)) on the real axis
        for (double x : {0.1, 0.9, 1.0, 1.1, 5.0}) CHECK(rel(phi_minus(r, x * w), std::conj(phi_plus(r, x * w))) < 1e-12);
    }
}

TEST_CASE("near-degenerate roots are flagged") {
    PhysicalParams p;
    p.omega_m = 1.0;
    p.lambda = 1.0;
    p.gamma_m = 0.1;
    const SpectralRoots r = spectral_roots(derive_working_params(p));
    CHECK_FALSE(r.near_degenerate);
    CHECK(r.regime == RootRegime::ComplexPair);
}

}
