#include "sncc/spectra.hpp"

#include <cmath>

namespace sncc {

namespace {

constexpr cplx I{0.0, 1.0};

void require_self(const WorkingParams& wp, const char* what) {
    if (wp.protocol != Protocol::SelfGravity)
        throw ParameterError(std::string(what) + ": self-gravity parameters required");
}

void require_mutual(const WorkingParams& wp, const char* what) {
    if (wp.protocol != Protocol::MutualGravity)
        throw ParameterError(std::string(what) + ": mutual-gravity parameters required");
}

// 2 w^2 + L^2 sin2theta - 2 sqrt(L^2 X s^2 + w^2 (w^2 + L^2 sin2theta)), X = L^2 + th.
double sn_bracket(double w, double L2, double s, double s2t, double th) {
    const double q = w * w + 0.5 * L2 * s2t;
    const double r = std::sqrt(L2 * (L2 + th) * s * s + w * w * (w * w + L2 * s2t));
    const double deficit = L2 * s * s * (L2 * s * s + th);   // r^2 - q^2
    if (q + r > 0.0) return -2.0 * deficit / (q + r);
    return 2.0 * (q - r);
}

}  // namespace

cplx chi_q(const WorkingParams& wp, double Omega) {
    return wp.lambda * wp.lambda / response(wp.quantum_omega(), wp.gamma_m, Omega);
}

cplx chi_q_raw(const WorkingParams& wp, double Omega, double mass) {
    if (!(mass > 0.0)) throw ParameterError("chi_q_raw: mass must be positive");
    return 1.0 / (mass * response(wp.quantum_omega(), wp.gamma_m, Omega));
}

SpectrumParts spectrum_self_parts(const WorkingParams& wp, double Omega) {
    require_self(wp, "spectrum_self");
    const double s = std::sin(wp.theta);
    const double s2t = std::sin(2.0 * wp.theta);
    const double L2 = wp.lambda * wp.lambda;
    const double rm2 = std::norm(response(wp.omega_m, wp.gamma_m, Omega));
    const double wm = wp.omega_m;

    SpectrumParts p;
    p.shot_backaction = 1.0 + (L2 * L2 * s * s + L2 * s2t * (wm - Omega) * (wm + Omega)) / rm2;
    p.bath = wp.thermal_force() * L2 * s * s / rm2;
    if (wp.theory == Theory::SN) {
        const double th = (wp.lambda_tilde - wp.lambda) * (wp.lambda_tilde + wp.lambda);
        const double wsn2 = wp.omega_grav * wp.omega_grav;
        p.sn_line = wsn2 * sn_bracket(wp.omega_q, L2, s, s2t, th) / rm2;
    }
    p.total = p.shot_backaction + p.bath + p.sn_line;
    return p;
}

double spectrum_self(const WorkingParams& wp, double Omega) { return spectrum_self_parts(wp, Omega).total; }

double spectrum_quantum_direct(const WorkingParams& wp, double Omega) {
    const double s = std::sin(wp.theta);
    const double s2t = std::sin(2.0 * wp.theta);
    const double L2 = wp.lambda * wp.lambda;
    const double Lt2 = wp.lambda_tilde * wp.lambda_tilde;
    const double w = wp.quantum_omega();
    const double rq2 = std::norm(response(w, wp.gamma_m, Omega));
    return 1.0 + (L2 * Lt2 * s * s + L2 * s2t * (w - Omega) * (w + Omega)) / rq2;
}

double spectrum_quantum_factored(const WorkingParams& wp, double Omega) {
    const FilterModel f(wp);
    const ResponseFunctions r = f.responses(Omega);
    return std::norm(r.a_q - r.r_q) / std::norm(r.r_q);
}

cplx transfer_self(const WorkingParams& wp, double Omega) {
    if (wp.theory == Theory::QG) return cplx(1.0, 0.0);
    const FilterModel f(wp);
    const ResponseFunctions r = f.responses(Omega);
    return (r.r_q / r.r_m) * (r.a_q - r.r_m) / (r.a_q - r.r_q);
}

double spectrum_self_transfer_route(const WorkingParams& wp, double Omega) {
    require_self(wp, "spectrum_self_transfer_route");
    const double s = std::sin(wp.theta);
    const double L2 = wp.lambda * wp.lambda;
    const double rm2 = std::norm(response(wp.omega_m, wp.gamma_m, Omega));
    return std::norm(transfer_self(wp, Omega)) * spectrum_quantum_direct(wp, Omega) +
           wp.classical_force() * L2 * s * s / rm2;
}

LineShape self_line_shape(const WorkingParams& wp) {
    require_self(wp, "self_line_shape");
    const double s = std::sin(wp.theta);
    const double s2t = std::sin(2.0 * wp.theta);
    const double L2 = wp.lambda * wp.lambda;
    LineShape l;
    l.omega = wp.omega_m;
    l.gamma = wp.gamma_m;
    l.n2 = -L2 * s2t;
    l.n0 = L2 * L2 * s * s + L2 * s2t * wp.omega_m * wp.omega_m + wp.thermal_force() * L2 * s * s;
    if (wp.theory == Theory::SN) {
        const double th = (wp.lambda_tilde - wp.lambda) * (wp.lambda_tilde + wp.lambda);
        l.n0 += wp.omega_grav * wp.omega_grav * sn_bracket(wp.omega_q, L2, s, s2t, th);
    }
    return l;
}

OutputMap self_output_map(const WorkingParams& wp, double Omega) {
    require_self(wp, "self_output_map");
    const WorkingParams w2 = with_theta(wp, std::numbers::pi / 2);
    const double L = wp.lambda;
    OutputMap m = OutputMap::Zero(2, 4);
    m(0, 0) = 1.0;
    if (wp.theory == Theory::QG) {
        const cplx chi = 1.0 / response(wp.omega_m, wp.gamma_m, Omega);
        m(1, 0) = L * L * chi;
        m(1, 1) = 1.0;
        m(1, 2) = L * chi * std::sqrt(wp.thermal_force());
        return m;
    }
    const double fq = wp.bath == ThermalBath::Quantum ? wp.thermal_force() : 0.0;
    const cplx chi = 1.0 / response(wp.omega_q, wp.gamma_m, Omega);
    const cplx k = transfer_self(w2, Omega);
    m(1, 0) = k * L * L * chi;
    m(1, 1) = k;
    m(1, 2) = k * L * chi * std::sqrt(fq);
    m(1, 3) = L * std::sqrt(wp.classical_force()) / response(wp.omega_m, wp.gamma_m, Omega);
    return m;
}

SelfCovariance covariance_self(const WorkingParams& wp, double Omega) {
    const OutputMap m = self_output_map(wp, Omega);
    SelfCovariance c;
    c.v = m * m.adjoint();
    // Cauchy-Binet: det(M M^dagger) as a sum of squared 2x2 minors, free of cancellation
    c.det = 0.0;
    for (int i = 0; i < m.cols(); ++i)
        for (int j = i + 1; j < m.cols(); ++j) c.det += std::norm(m(0, i) * m(1, j) - m(0, j) * m(1, i));

    const double L2 = wp.lambda * wp.lambda;
    if (wp.theory == Theory::QG) {
        c.det_closed = 1.0 + wp.thermal_force() * L2 / std::norm(response(wp.omega_m, wp.gamma_m, Omega));
    } else {
        const double k2 = std::norm(transfer_self(with_theta(wp, std::numbers::pi / 2), Omega));
        if (wp.bath == ThermalBath::Classical)
            c.det_closed = k2 + wp.classical_force() * L2 / std::norm(response(wp.omega_m, wp.gamma_m, Omega));
        else
            c.det_closed = k2 * (1.0 + wp.thermal_force() * L2 / std::norm(response(wp.omega_q, wp.gamma_m, Omega)));
    }
    return c;
}

MutualTransfer mutual_output_transfer(const WorkingParams& wp, double Omega) {
    require_mutual(wp, "mutual_output_transfer");
    MutualTransfer out;
    const double wg2 = wp.omega_grav * wp.omega_grav;
    {
        const FilterModel f(wp);
        const ResponseFunctions r = f.responses(Omega);
        const cplx lk = wp.lambda * std::sin(wp.theta) * f.wiener(Omega);
        const cplx rr = r.r_plus * r.r_minus;
        // 1 + w_g^4 lk/(R+ R-) with R+ R- = R_q^2 - w_g^4
        const cplx rest = f.wiener_complement(Omega);
        out.wiener.t_aa = r.r_q * (r.r_q - wg2 * wg2 * rest / r.r_q) / rr;
        out.wiener.t_ab = wg2 * r.r_q * lk / rr;
    }
    const WorkingParams w2 = with_theta(wp, std::numbers::pi / 2);
    const FilterModel f(w2);
    const ResponseFunctions r = f.responses(Omega);
    {
        // [1 - w_g^2 L chi [[K_BA, K_BB], [K_AA, K_AB]]]^-1 through its symmetric and
        // antisymmetric modes
        const MutualFilters k = mutual_filters(w2, Omega);
        const cplx c = wg2 * wp.lambda / r.r_q;
        const cplx sum = 1.0 - c * (k.k_aa + k.k_ab);
        const cplx diff = 1.0 + c * (k.k_aa - k.k_ab);
        out.sme_matrix.t_aa = 0.5 * (1.0 / sum + 1.0 / diff);
        out.sme_matrix.t_ab = 0.5 * (1.0 / sum - 1.0 / diff);
    }
    {
        const cplx a = r.a_mutual;
        const cplx den = r.r_plus * r.r_minus * (2.0 * a + r.r_q);
        // 1 + 2 w_g^4 a/(R+ R- (2a + R_q)) over a common denominator
        out.sme.t_aa = r.r_q * (r.r_q * (2.0 * a + r.r_q) - wg2 * wg2) / den;
        out.sme.t_ab = 2.0 * wg2 * a * r.r_q / den;
    }
    return out;
}

OutputMap mutual_output_map(const WorkingParams& wp, double Omega) {
    require_mutual(wp, "mutual_output_map");
    const double L = wp.lambda;
    const double wg2 = wp.omega_grav * wp.omega_grav;
    const cplx rq = response(wp.omega_q, wp.gamma_m, Omega);
    const cplx det = response_sq(wp.omega_q * wp.omega_q + wg2, wp.gamma_m, Omega) *
                     response_sq(wp.omega_q * wp.omega_q - wg2, wp.gamma_m, Omega);
    OutputMap m = OutputMap::Zero(4, 8);
    m(0, 0) = 1.0;
    m(2, 4) = 1.0;

    if (wp.theory == Theory::QG) {
        const double sf = std::sqrt(wp.thermal_force());
        // x_A = (R_q F_A + w_g^2 F_B)/det with F = L a1 + f
        for (int mirror = 0; mirror < 2; ++mirror) {
            const int own = 4 * mirror, other = 4 * (1 - mirror);
            const int row = 2 * mirror + 1;
            m(row, own + 1) = 1.0;
            m(row, own + 0) += L * L * rq / det;
            m(row, own + 2) += L * sf * rq / det;
            m(row, other + 0) += L * L * wg2 / det;
            m(row, other + 2) += L * sf * wg2 / det;
        }
        return m;
    }

    const MutualTransfer t = mutual_output_transfer(with_theta(wp, std::numbers::pi / 2), Omega);
    const cplx taa = t.wiener.t_aa, tab = t.wiener.t_ab;
    const double fq = std::sqrt(wp.bath == ThermalBath::Quantum ? wp.thermal_force() : 0.0);
    const double fc = std::sqrt(wp.classical_force());
    for (int mirror = 0; mirror < 2; ++mirror) {
        const int own = 4 * mirror, other = 4 * (1 - mirror);
        const int row = 2 * mirror + 1;
        // quantum part of each record: a2 + L^2 chi a1 + L chi f
        m(row, own + 1) += taa;
        m(row, own + 0) += taa * L * L / rq;
        m(row, own + 2) += taa * L * fq / rq;
        m(row, other + 1) += tab;
        m(row, other + 0) += tab * L * L / rq;
        m(row, other + 2) += tab * L * fq / rq;
        // classical force drives the coupled conditional means
        m(row, own + 3) += L * fc * rq / det;
        m(row, other + 3) += L * fc * wg2 / det;
    }
    return m;
}

CovarianceBlocks blocks_from_map(const OutputMap& m) {
    const Eigen::MatrixXcd s = m * m.adjoint();
    CovarianceBlocks b;
    b.sigma_a = s.block<2, 2>(0, 0);
    b.sigma_b = s.block<2, 2>(2, 2);
    b.sigma_ab = s.block<2, 2>(0, 2);
    return b;
}

CovarianceBlocks covariance_mutual(const WorkingParams& wp, double Omega) {
    return blocks_from_map(mutual_output_map(wp, Omega));
}

CovarianceBlocks covariance_mutual(WorkingParams wp, double Omega, Theory theory) {
    wp.theory = theory;
    return covariance_mutual(wp, Omega);
}

std::pair<double, cplx> mutual_record_spectra(const WorkingParams& wp, double Omega) {
    require_mutual(wp, "mutual_record_spectra");
    if (wp.theory != Theory::SN) throw ParameterError("mutual_record_spectra: SN theory only");
    const double s = std::sin(wp.theta), c = std::cos(wp.theta);
    const double L = wp.lambda;
    const double wg2 = wp.omega_grav * wp.omega_grav;
    const cplx rq = response(wp.omega_q, wp.gamma_m, Omega);
    const cplx det = response_sq(wp.omega_q * wp.omega_q + wg2, wp.gamma_m, Omega) *
                     response_sq(wp.omega_q * wp.omega_q - wg2, wp.gamma_m, Omega);
    const MutualTransfer t = mutual_output_transfer(wp, Omega);
    const double fq = std::sqrt(wp.bath == ThermalBath::Quantum ? wp.thermal_force() : 0.0);
    const double fc = std::sqrt(wp.classical_force());
    // y_theta^q = c a1 + s a2 + L s x_q, x_q = (L a1 + f)/R_q
    Eigen::Matrix<cplx, 2, 8> m = Eigen::Matrix<cplx, 2, 8>::Zero();
    for (int mirror = 0; mirror < 2; ++mirror) {
        const int own = 4 * mirror, other = 4 * (1 - mirror);
        Eigen::Matrix<cplx, 1, 4> yq;
        yq << c + L * L * s / rq, s, L * s * fq / rq, 0.0;
        m.block<1, 4>(mirror, own) += t.wiener.t_aa * yq;
        m.block<1, 4>(mirror, other) += t.wiener.t_ab * yq;
        m(mirror, own + 3) += L * s * fc * rq / det;
        m(mirror, other + 3) += L * s * fc * wg2 / det;
    }
    const Eigen::Matrix2cd sig = m * m.adjoint();
    return {sig(0, 0).real(), sig(0, 1)};
}

}  // namespace sncc
