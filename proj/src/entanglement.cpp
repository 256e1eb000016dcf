#include "sncc/entanglement.hpp"

#include <cmath>
#include <complex>

namespace sncc {

namespace {

double det2(const Eigen::Matrix2cd& m) { return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real(); }

void check_hermitian(const Eigen::Matrix2cd& m, const char* name) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NegativityError(std::string("log_negativity: block ") + name + " is not Hermitian");
    if (m(0, 0).real() < 0.0 || m(1, 1).real() < 0.0)
        throw NegativityError(std::string("log_negativity: block ") + name + " has negative diagonal");
}

NegativityResult finish(double sigma, double det) {
    const double disc = sigma * sigma - 4.0 * det;
    if (disc < -1e-12 * sigma * sigma) throw NegativityError("log_negativity: negative discriminant");
    const double root = std::sqrt(std::max(disc, 0.0));
    NegativityResult r;
    r.sigma = sigma;
    r.det = det;
    // smaller root of x^2 - Sigma x + det = 0
    const double nu2 = sigma + root > 0.0 ? 2.0 * det / (sigma + root) : 0.5 * (sigma - root);
    if (!(nu2 > 0.0)) throw NegativityError("log_negativity: non-positive symplectic eigenvalue");
    r.n_raw = -0.5 * std::log(nu2);
    r.eps_n = std::max(r.n_raw, 0.0);
    return r;
}

}  // namespace

NegativityResult log_negativity(const CovarianceBlocks& b) {
    check_hermitian(b.sigma_a, "sigma_A");
    check_hermitian(b.sigma_b, "sigma_B");
    using lc = std::complex<long double>;
    Eigen::Matrix<lc, 4, 4> full;
    full << b.sigma_a.cast<lc>(), b.sigma_ab.cast<lc>(), b.sigma_ab.adjoint().cast<lc>(), b.sigma_b.cast<lc>();
    const double det = static_cast<double>(full.partialPivLu().determinant().real());
    const double sigma = det2(b.sigma_a) + det2(b.sigma_b) - 2.0 * det2(b.sigma_ab);
    return finish(sigma, det);
}

NegativityResult log_negativity_from_map(const OutputMap& map) {
    if (map.rows() != 4) throw std::invalid_argument("log_negativity_from_map: expected 4 rows");
    Eigen::MatrixXcd m = map;
    // Local shear y2 -> y2 - c y1 (unit determinant, leaves the invariants unchanged).
    for (int a : {0, 2}) {
        const cplx c = m.row(a).dot(m.row(a + 1)) / m.row(a).squaredNorm();
        m.row(a + 1) -= c * m.row(a);
    }
    auto gram_det = [](const Eigen::MatrixXcd& rows) {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(rows.adjoint());
        const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
        double d = 1.0;
        for (Eigen::Index i = 0; i < rows.rows(); ++i) d *= std::norm(r(i, i));
        return d;
    };
    Eigen::MatrixXcd a(2, m.cols()), b(2, m.cols());
    a << m.row(0), m.row(1);
    b << m.row(2), m.row(3);
    const double det_a = gram_det(a);
    const double det_b = gram_det(b);
    const double det = gram_det(m);
    // cross block sigma_AB(i, j) = <y_i^A, y_j^B*>
    Eigen::Matrix2cd c;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c(i, j) = b.row(j).dot(a.row(i));
    const double sigma = det_a + det_b - 2.0 * det2(c);
    return finish(sigma, det);
}

}  // namespace sncc
