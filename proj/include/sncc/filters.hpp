#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sncc/factorization.hpp"
#include "sncc/model.hpp"
#include "sncc/riccati.hpp"

namespace sncc {

// omega^2 - Omega^2 - i gamma Omega, evaluated without cancellation near resonance.
cplx response(double omega, double gamma, double Omega);
// Same with a squared frequency (may be negative).
cplx response_sq(double omega2, double gamma, double Omega);

struct ResponseFunctions {
    cplx r_m;
    cplx r_q;
    cplx r_plus;
    cplx r_minus;
    cplx a_q;        // A_q^theta
    cplx a_mutual;   // V L^2 (V L^2 + gamma - i Omega) at theta = pi/2
};

// Precomputed steady-state data for repeated frequency evaluation.
class FilterModel {
public:
    explicit FilterModel(const WorkingParams& wp);

    const WorkingParams& params() const { return wp_; }
    const SpectralRoots& roots() const { return roots_; }
    const SteadyMoments& steady() const { return steady_; }

    ResponseFunctions responses(double Omega) const;
    cplx a_q(cplx Omega) const;

    cplx wiener(double Omega) const;
    // 1 - Lambda sin(theta) K(Omega), without cancellation near resonance.
    cplx wiener_complement(double Omega) const;
    cplx kalman_full(double Omega) const;
    cplx kalman_quantum(double Omega) const;

    double gamma_decay() const;
    double omega_x_squared() const;
    double time_domain(double t) const;

private:
    WorkingParams wp_;
    SpectralRoots roots_;
    SteadyMoments steady_;
    SteadyMoments steady_half_pi_;
};

enum class KalmanVariant { FullRecord, QuantumRecord };

cplx wiener_filter(const WorkingParams& wp, double Omega);
// Wiener filter built from the given roots (used to inject perturbed roots).
cplx wiener_from_roots(const WorkingParams& wp, const SpectralRoots& r, double Omega);
cplx kalman_filter(const WorkingParams& wp, double Omega, KalmanVariant v);
double filter_time_domain(const WorkingParams& wp, double t);

struct MutualFilters {
    cplx k_q;    // per-mirror Wiener filter with omega_q
    cplx k_aa;   // two-channel Kalman forms, theta = pi/2
    cplx k_ab;
};

MutualFilters mutual_filters(const WorkingParams& wp, double Omega);

struct FilterFrequencyResponse {
    std::string label;
    std::vector<double> omega;
    std::vector<cplx> value;
};

FilterFrequencyResponse sample_filter(const std::string& label, const std::vector<double>& grid,
                                      const std::function<cplx(double)>& k);

// Fraction of L2 mass at t < 0 of the inverse transform of K, sampled on
// n points in [-omega_max, omega_max). A causal 1/Omega tail is removed first.
double anticausal_fraction(const std::function<cplx(double)>& k, double omega_max, std::size_t n);

}  // namespace sncc
