#pragma once

#include <array>

#include "sncc/model.hpp"

namespace sncc {

enum class RootRegime { ComplexPair, RealRoots };

// Stable scalar combinations of the quartic coefficients.
struct RootInvariants {
    double omega = 0.0;        // oscillator frequency entering the quartic
    double a1 = 0.0;
    double a2 = 0.0;
    double sqrt_a2 = 0.0;
    double disc = 0.0;         // a2 - a1^2
    double excess = 0.0;       // sqrt(a2) - a1 - gamma^2
    double rate = 0.0;         // -(2b + gamma), closed-loop damping excess
    double bbc_minus_w2 = 0.0; // beta*beta_c - omega^2
};

struct SpectralRoots {
    double a1 = 0.0;
    double a2 = 0.0;
    double a = 0.0;
    double b = 0.0;
    cplx beta;
    cplx beta_c;
    cplx eta;
    cplx eta_c;
    RootRegime regime = RootRegime::ComplexPair;
    bool near_degenerate = false;
    RootInvariants inv;
};

RootInvariants root_invariants(const WorkingParams& wp);

// Coefficients of Omega^4, Omega^2, Omega^0 of S(Omega) |R(Omega)|^2.
std::array<double, 3> quartic_coefficients(const WorkingParams& wp);

SpectralRoots spectral_roots(const WorkingParams& wp);

cplx phi_plus(const SpectralRoots& r, cplx omega);
cplx phi_minus(const SpectralRoots& r, cplx omega);

}  // namespace sncc
