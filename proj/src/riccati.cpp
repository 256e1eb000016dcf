#include "sncc/riccati.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "sncc/factorization.hpp"

namespace sncc {

namespace {

struct RiccatiCoefficients {
    double w2, g, k, lsc, drive;  // k = 2 L^2 s^2, lsc = L^2 s c, drive = (Lt^2 - L^2 c^2)/2
};

RiccatiCoefficients coefficients(const WorkingParams& wp) {
    const double s = std::sin(wp.theta);
    const double c = std::cos(wp.theta);
    const double L2 = wp.lambda * wp.lambda;
    const double w = wp.quantum_omega();
    RiccatiCoefficients r;
    r.w2 = w * w;
    r.g = wp.gamma_m;
    r.k = 2.0 * L2 * s * s;
    r.lsc = L2 * s * c;
    r.drive = 0.5 * (wp.lambda_tilde * wp.lambda_tilde - L2 * c * c);
    return r;
}

}  // namespace

ConditionalMoments riccati_rhs(const ConditionalMoments& m, const WorkingParams& wp) {
    const RiccatiCoefficients q = coefficients(wp);
    ConditionalMoments d;
    d.vxx = 2.0 * m.vxp - q.k * m.vxx * m.vxx;
    d.vxp = -q.g * m.vxp + m.vpp - q.w2 * m.vxx - q.k * m.vxx * m.vxp - q.lsc * m.vxx;
    d.vpp = -2.0 * q.g * m.vpp - 2.0 * q.w2 * m.vxp - q.k * m.vxp * m.vxp - 2.0 * q.lsc * m.vxp +
            q.drive;
    return d;
}

bool is_valid_covariance(const ConditionalMoments& m, double tol) {
    if (!std::isfinite(m.vxx) || !std::isfinite(m.vxp) || !std::isfinite(m.vpp)) return false;
    const double scale = std::abs(m.vxx * m.vpp) + m.vxp * m.vxp;
    return m.vxx >= -tol * std::abs(m.vpp + m.vxx) && m.vpp >= -tol * std::abs(m.vpp + m.vxx) &&
           m.det() >= -tol * scale;
}

ConditionalMoments riccati_step(const ConditionalMoments& m, const WorkingParams& wp, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("riccati_step: dt must be positive");
    auto axpy = [](const ConditionalMoments& a, const ConditionalMoments& d, double h) {
        return ConditionalMoments{a.vxx + h * d.vxx, a.vxp + h * d.vxp, a.vpp + h * d.vpp};
    };
    const ConditionalMoments k1 = riccati_rhs(m, wp);
    const ConditionalMoments k2 = riccati_rhs(axpy(m, k1, 0.5 * dt), wp);
    const ConditionalMoments k3 = riccati_rhs(axpy(m, k2, 0.5 * dt), wp);
    const ConditionalMoments k4 = riccati_rhs(axpy(m, k3, dt), wp);
    ConditionalMoments out;
    out.vxx = m.vxx + dt / 6.0 * (k1.vxx + 2.0 * k2.vxx + 2.0 * k3.vxx + k4.vxx);
    out.vxp = m.vxp + dt / 6.0 * (k1.vxp + 2.0 * k2.vxp + 2.0 * k3.vxp + k4.vxp);
    out.vpp = m.vpp + dt / 6.0 * (k1.vpp + 2.0 * k2.vpp + 2.0 * k3.vpp + k4.vpp);
    if (!is_valid_covariance(out, 1e-9)) throw CovarianceError("riccati_step: covariance lost positivity");
    return out;
}

ConditionalMoments riccati_propagate(const ConditionalMoments& m, const WorkingParams& wp, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("riccati_propagate: t must be >= 0");
    if (t == 0.0) return m;
    const RiccatiCoefficients q = coefficients(wp);

    // P' = F P + P F^T + Q - P C^T C P with the cross term folded into F.
    Eigen::Matrix2d F;
    F << 0.0, 1.0, -q.w2 - q.lsc, -q.g;
    Eigen::Matrix2d CtC = Eigen::Matrix2d::Zero();
    CtC(0, 0) = q.k;
    Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
    Q(1, 1) = q.drive;

    Eigen::Matrix4d H;
    H.topLeftCorner<2, 2>() = -F.transpose();
    H.topRightCorner<2, 2>() = CtC;
    H.bottomLeftCorner<2, 2>() = Q;
    H.bottomRightCorner<2, 2>() = F;

    // Chunk length keeps exp(H tau) well scaled.
    double rate = 0.5 * q.g;
    if (wp.lambda > 0.0 && std::sin(wp.theta) != 0.0) rate = 0.5 * (q.g + steady_vxx(wp).gain);
    double tau = rate > 0.0 ? std::min(t, 8.0 / rate) : t;
    const long chunks = static_cast<long>(std::ceil(t / tau));
    tau = t / static_cast<double>(chunks);

    const Eigen::Matrix4d Phi = (H * tau).exp();
    Eigen::Matrix2d P;
    P << m.vxx, m.vxp, m.vxp, m.vpp;
    for (long i = 0; i < chunks; ++i) {
        const Eigen::Matrix2d X = Phi.topLeftCorner<2, 2>() + Phi.topRightCorner<2, 2>() * P;
        const Eigen::Matrix2d Y = Phi.bottomLeftCorner<2, 2>() + Phi.bottomRightCorner<2, 2>() * P;
        P = Y * X.inverse();
        P = 0.5 * (P + P.transpose()).eval();
    }
    return ConditionalMoments{P(0, 0), P(0, 1), P(1, 1)};
}

SteadyMoments steady_vxx(const WorkingParams& wp) {
    const double s = std::sin(wp.theta);
    if (!(wp.theta > 0.0) || wp.theta >= std::numbers::pi || s <= 0.0)
        throw ParameterError("steady_vxx: theta must lie in (0, pi)");
    if (!(wp.lambda > 0.0)) throw ParameterError("steady_vxx: no measurement (Lambda = 0)");

    const RootInvariants inv = root_invariants(wp);
    const double L2 = wp.lambda * wp.lambda;
    const double k = 2.0 * L2 * s * s;

    SteadyMoments out;
    out.gain = inv.rate;
    ConditionalMoments& m = out.moments;
    m.vxx = inv.rate / k;
    m.vxp = 0.5 * inv.rate * m.vxx;
    const double w = inv.omega;
    m.vpp = wp.gamma_m * m.vxp + w * w * m.vxx + k * m.vxx * m.vxp + L2 * s * std::cos(wp.theta) * m.vxx;

    const SpectralRoots r = spectral_roots(wp);
    const cplx compact = (cplx(-wp.gamma_m, 0.0) + cplx(0.0, 1.0) * (r.beta - r.beta_c)) / k;
    out.vxx_compact = compact.real();
    if (!(std::abs(compact - m.vxx) * k <= 1e-9 * (wp.gamma_m + inv.rate)))
        throw std::runtime_error("steady_vxx: closed and compact forms disagree");
    return out;
}

}  // namespace sncc
