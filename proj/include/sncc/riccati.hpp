#pragma once

#include "sncc/model.hpp"

namespace sncc {

// Conditional second moments in reduced units (hbar = M = 1).
struct ConditionalMoments {
    double vxx = 0.0;
    double vxp = 0.0;
    double vpp = 0.0;

    double det() const { return vxx * vpp - vxp * vxp; }
};

struct SteadyMoments {
    ConditionalMoments moments;
    double vxx_compact = 0.0;   // (-gamma + i(beta - beta_c)) / (2 Lambda^2 sin^2 theta)
    double gain = 0.0;          // 2 Lambda^2 sin^2 theta V_xx
};

class CovarianceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ConditionalMoments riccati_rhs(const ConditionalMoments& m, const WorkingParams& wp);

// One classical Runge-Kutta step.
ConditionalMoments riccati_step(const ConditionalMoments& m, const WorkingParams& wp, double dt);

// Exact flow over a time t (Hamiltonian matrix exponential, chunked).
ConditionalMoments riccati_propagate(const ConditionalMoments& m, const WorkingParams& wp, double t);

SteadyMoments steady_vxx(const WorkingParams& wp);

bool is_valid_covariance(const ConditionalMoments& m, double tol = 1e-12);

}  // namespace sncc
