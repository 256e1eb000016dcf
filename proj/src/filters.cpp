#include "sncc/filters.hpp"

#include <cmath>

#include <fftw3.h>

namespace sncc {

namespace {
constexpr cplx I{0.0, 1.0};
}

cplx response(double omega, double gamma, double Omega) {
    return cplx((omega - Omega) * (omega + Omega), -gamma * Omega);
}

cplx response_sq(double omega2, double gamma, double Omega) {
    if (omega2 > 0.0) return response(std::sqrt(omega2), gamma, Omega);
    return cplx(omega2 - Omega * Omega, -gamma * Omega);
}

FilterModel::FilterModel(const WorkingParams& wp)
    : wp_(wp),
      roots_(spectral_roots(wp)),
      steady_(steady_vxx(wp)),
      steady_half_pi_(steady_vxx(with_theta(wp, std::numbers::pi / 2))) {}

cplx FilterModel::a_q(cplx Omega) const {
    const double g = steady_.gain;
    const double L2 = wp_.lambda * wp_.lambda;
    return -0.5 * g * g - g * (wp_.gamma_m - I * Omega) - 0.5 * L2 * std::sin(2.0 * wp_.theta);
}

ResponseFunctions FilterModel::responses(double Omega) const {
    ResponseFunctions r;
    const double g = wp_.gamma_m;
    r.r_m = response(wp_.omega_m, g, Omega);
    r.r_q = response(wp_.quantum_omega(), g, Omega);
    const double wq2 = wp_.omega_q * wp_.omega_q;
    const double wg2 = wp_.omega_grav * wp_.omega_grav;
    r.r_plus = response_sq(wq2 + wg2, g, Omega);
    r.r_minus = response_sq(wq2 - wg2, g, Omega);
    r.a_q = a_q(Omega);
    const double vl2 = steady_half_pi_.moments.vxx * wp_.lambda * wp_.lambda;
    r.a_mutual = vl2 * (vl2 + g - I * Omega);
    return r;
}

cplx FilterModel::wiener(double Omega) const { return wiener_from_roots(wp_, roots_, Omega); }

namespace {

// (beta - Omega)(Omega + beta_c)
cplx root_product(const SpectralRoots& r, double Omega) {
    if (r.regime == RootRegime::ComplexPair)
        return r.inv.bbc_minus_w2 + I * (2.0 * r.b * Omega) - (Omega - r.inv.omega) * (Omega + r.inv.omega);
    return (r.beta - Omega) * (Omega + r.beta_c);
}

}  // namespace

cplx wiener_from_roots(const WorkingParams& wp, const SpectralRoots& r, double Omega) {
    const double s = std::sin(wp.theta);
    // beta beta_c - omega^2 + Omega (beta - beta_c) + i gamma Omega
    const cplx num = r.inv.bbc_minus_w2 - I * (r.inv.rate * Omega);
    return num / (wp.lambda * s * root_product(r, Omega));
}

cplx FilterModel::wiener_complement(double Omega) const {
    if (roots_.regime == RootRegime::ComplexPair)
        return response(wp_.quantum_omega(), wp_.gamma_m, Omega) / root_product(roots_, Omega);
    return 1.0 - wp_.lambda * std::sin(wp_.theta) * wiener(Omega);
}

cplx FilterModel::kalman_full(double Omega) const {
    const cplx a = a_q(Omega);
    const cplx rm = response(wp_.omega_m, wp_.gamma_m, Omega);
    return a / (wp_.lambda * std::sin(wp_.theta) * (a - rm));
}

cplx FilterModel::kalman_quantum(double Omega) const {
    const cplx a = a_q(Omega);
    const cplx rq = response(wp_.quantum_omega(), wp_.gamma_m, Omega);
    return a / (wp_.lambda * std::sin(wp_.theta) * (a - rq));
}

double FilterModel::gamma_decay() const { return 0.5 * (wp_.gamma_m + steady_.gain); }

double FilterModel::omega_x_squared() const {
    const double g = steady_.gain;
    const double wm = wp_.mean_omega();
    const double gm = wp_.gamma_m;
    return wm * wm - 0.25 * gm * gm + 0.5 * wp_.lambda * wp_.lambda * std::sin(2.0 * wp_.theta) +
           0.5 * g * gm + 0.25 * g * g;
}

double FilterModel::time_domain(double t) const {
    if (t < 0.0) return 0.0;
    const double s = std::sin(wp_.theta);
    const double c = std::cos(wp_.theta);
    const double V = steady_.moments.vxx;
    const double L = wp_.lambda;
    const double ox2 = omega_x_squared();
    double cs, sn;
    if (ox2 > 0.0) {
        const double ox = std::sqrt(ox2);
        cs = std::cos(ox * t);
        sn = std::sin(ox * t) / ox;
    } else if (ox2 < 0.0) {
        const double k = std::sqrt(-ox2);
        cs = std::cosh(k * t);
        sn = std::sinh(k * t) / k;
    } else {
        cs = 1.0;
        sn = t;
    }
    return std::exp(-gamma_decay() * t) * (2.0 * s * L * V * cs + L * (c + wp_.gamma_m * s * V) * sn);
}

cplx wiener_filter(const WorkingParams& wp, double Omega) { return FilterModel(wp).wiener(Omega); }

cplx kalman_filter(const WorkingParams& wp, double Omega, KalmanVariant v) {
    const FilterModel f(wp);
    return v == KalmanVariant::FullRecord ? f.kalman_full(Omega) : f.kalman_quantum(Omega);
}

double filter_time_domain(const WorkingParams& wp, double t) {
    if (t < 0.0) return 0.0;
    return FilterModel(wp).time_domain(t);
}

MutualFilters mutual_filters(const WorkingParams& wp, double Omega) {
    if (wp.protocol != Protocol::MutualGravity)
        throw ParameterError("mutual_filters: mutual-gravity parameters required");
    const FilterModel f(wp);
    const ResponseFunctions r = f.responses(Omega);
    MutualFilters m;
    m.k_q = f.wiener(Omega);
    const cplx minus = r.a_mutual / (wp.lambda * (2.0 * r.a_mutual + r.r_minus));
    const cplx plus = r.a_mutual / (wp.lambda * (2.0 * r.a_mutual + r.r_plus));
    m.k_aa = minus + plus;
    m.k_ab = minus - plus;
    return m;
}

FilterFrequencyResponse sample_filter(const std::string& label, const std::vector<double>& grid,
                                      const std::function<cplx(double)>& k) {
    FilterFrequencyResponse out;
    out.label = label;
    out.omega = grid;
    out.value.reserve(grid.size());
    for (double w : grid) out.value.push_back(k(w));
    return out;
}

double anticausal_fraction(const std::function<cplx(double)>& k, double omega_max, std::size_t n) {
    if (n < 16 || n % 2 != 0) throw std::invalid_argument("anticausal_fraction: n must be even and >= 16");
    const double dw = 2.0 * omega_max / static_cast<double>(n);
    // Tail K ~ c0 i / Omega, removed with the causal c0 / (kappa - i Omega).
    const double wt = omega_max * (1.0 - 2.0 / static_cast<double>(n));
    const double c0 = (k(wt) * (-I * wt)).real();
    const double kappa = omega_max / 16.0;

    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    for (std::size_t j = 0; j < n; ++j) {
        // Index j maps to Omega = j dw for j < n/2 and (j - n) dw otherwise.
        const double w = (j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n)) * dw;
        const cplx v = k(w) - c0 / (kappa - I * w);
        buf[j][0] = v.real();
        buf[j][1] = v.imag();
    }
    fftw_execute(plan);
    // Convention K(Omega) = int K(t) e^{i Omega t} dt, so K(t) ~ sum K_j e^{-i Omega_j t}:
    // the backward DFT index m gives e^{+i...}, i.e. time t = -m dt.
    double neg = 0.0, total = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double p = buf[m][0] * buf[m][0] + buf[m][1] * buf[m][1];
        total += p;
        if (m > 0 && m < n / 2) neg += p;
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
    return total > 0.0 ? neg / total : 0.0;
}

}  // namespace sncc
